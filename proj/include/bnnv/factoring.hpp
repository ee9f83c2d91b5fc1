#pragma once

#include "bnnv/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bnnv {

/// Weight cell of a factoring matrix. BNN layers only contain Zero/One;
/// Absent marks a missing link (graph reductions) and never agrees with
/// anything.
enum class Cell : std::uint8_t { Zero = 0, One = 1, Absent = 2 };

/// Neurons x inputs matrix of weight bits. For a BNN layer, row i is neuron
/// i (0-based) and column j is input j with column 0 being the bias.
class WeightMatrix {
public:
  WeightMatrix() = default;
  WeightMatrix(int rows, int cols, Cell fill = Cell::Zero);

  static WeightMatrix from_layer(const Layer &layer);
  /// Rows given as strings of '0', '1' and '.' (absent).
  static WeightMatrix from_rows(const std::vector<std::string> &rows);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  Cell at(int r, int c) const { return cells_[index(r, c)]; }
  void set(int r, int c, Cell v) { cells_[index(r, c)] = v; }
  bool present(int r, int c) const { return at(r, c) != Cell::Absent; }

  bool operator==(const WeightMatrix &) const = default;

private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Cell> cells_;
};

WeightMatrix parse_weight_matrix(std::string_view text);
std::string serialize_weight_matrix(const WeightMatrix &m);

/// A set I of neurons sharing identical weights on a set J of inputs.
/// Indices are 0-based rows and matrix columns, kept sorted.
struct Factoring {
  std::vector<int> neurons;
  std::vector<int> inputs;

  bool operator==(const Factoring &) const = default;
};

/// (|I| - 1) * |J|
long saving(const Factoring &f);

/// True iff the cell sets I1 x J1 and I2 x J2 are disjoint.
bool non_overlapping(const Factoring &a, const Factoring &b);

/// Boolean mask over the cells of a matrix.
class CellMask {
public:
  CellMask() = default;
  CellMask(int rows, int cols) : rows_(rows), cols_(cols), bits_(static_cast<std::size_t>(rows) * cols) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool test(int r, int c) const { return bits_[static_cast<std::size_t>(r) * cols_ + c] != 0; }
  void set(int r, int c) { bits_[static_cast<std::size_t>(r) * cols_ + c] = 1; }
  std::size_t count() const;

  bool operator==(const CellMask &) const = default;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Pairwise non-overlapping factorings of one matrix together with the
/// cells they cover.
class FactoringSet {
public:
  FactoringSet() = default;
  FactoringSet(int rows, int cols) : used_(rows, cols) {}

  /// Adds f; throws ShapeError if it overlaps a member or is out of range.
  void add(Factoring f);

  const std::vector<Factoring> &factorings() const noexcept { return factorings_; }
  const CellMask &used() const noexcept { return used_; }
  long total_saving() const;
  bool empty() const noexcept { return factorings_.empty(); }
  std::size_t size() const noexcept { return factorings_.size(); }

private:
  std::vector<Factoring> factorings_;
  CellMask used_;
};

/// Checks the factoring definition against the matrix: |I| > 1, indices in
/// range and all rows of I carry identical present weights on every column
/// of J.
bool is_valid_factoring(const WeightMatrix &m, const Factoring &f);
/// is_valid_factoring for every member, pairwise non-overlap, and that the
/// used mask is exactly the union of the members' cells.
bool is_valid_factoring_set(const WeightMatrix &m, const FactoringSet &set);

/// Best factoring containing cell (neuron, column) that avoids used cells,
/// or nullopt when no factoring with positive saving exists. Ties go to the
/// lowest candidate column.
std::optional<Factoring> get_factoring(const WeightMatrix &m, int neuron, int column,
                                       const CellMask &used);

/// Greedy per-neuron factoring search over the whole matrix.
FactoringSet find_factorings(const WeightMatrix &m);

struct BlockSize {
  int rows = 64;
  int cols = 64;
};

/// Runs find_factorings independently on disjoint rectangular blocks (in
/// parallel) and merges the results in block order.
FactoringSet find_factorings_partitioned(const WeightMatrix &m, BlockSize block);

struct OptimalFactorings {
  FactoringSet set;
  long total_saving = 0;
};

/// Exact maximum total saving over at most k pairwise non-overlapping
/// factorings. Exponential; guarded to 8 x 8 matrices and a bounded number
/// of candidate combinations.
OptimalFactorings brute_force_optimal_factorings(const WeightMatrix &m, int k);

// --- bipartite graphs and the biclique reduction -------------------------

struct BipartiteGraph {
  int left = 0;
  int right = 0;
  /// (left vertex, right vertex), both 0-based.
  std::vector<std::pair<int, int>> edges;

  bool has_edge(int a, int b) const;
};

BipartiteGraph parse_bipartite_graph(std::string_view text);
std::string serialize_bipartite_graph(const BipartiteGraph &g);

/// Row 0 is the extra neuron connected to every input with weight 1; row
/// a+1 is left vertex a, with a 1 on column b for every edge (a, b) and no
/// link elsewhere.
WeightMatrix reduce_meb_to_factoring(const BipartiteGraph &g);

struct Biclique {
  std::vector<int> left;
  std::vector<int> right;
  long edges = 0;
};

/// Exact maximum edge biclique; guarded to 12 vertices per side.
Biclique brute_force_max_edge_biclique(const BipartiteGraph &g);

// --- whole-model factoring ------------------------------------------------

enum class FactoringMode { Off, Heuristic, Partitioned };

FactoringMode parse_factoring_mode(std::string_view s);
std::string_view to_string(FactoringMode mode);

/// One FactoringSet per layer (index l-1 for layer l).
using ModelFactoring = std::vector<FactoringSet>;

ModelFactoring factor_model(const BnnModel &model, FactoringMode mode, BlockSize block = {});
ModelFactoring empty_factoring(const BnnModel &model);
long total_saving(const ModelFactoring &f);

/// Text report: one line per factoring with 1-based neuron indices and
/// input columns (0 = bias), then per-layer and overall totals.
std::string factoring_report(const ModelFactoring &f);

} // namespace bnnv
