#include "bnnv/factoring.hpp"

#include "bnnv/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <future>
#include <numeric>

namespace bnnv {

namespace {

/// Fixed-capacity bitset over neuron indices.
class IndexSet {
public:
  IndexSet() = default;
  explicit IndexSet(int capacity) : words_(static_cast<std::size_t>((capacity + 63) / 64), 0) {}

  void insert(int i) { words_[static_cast<std::size_t>(i) >> 6] |= std::uint64_t{1} << (i & 63); }
  bool contains(int i) const {
    return (words_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1U;
  }
  int size() const {
    int n = 0;
    for (auto w : words_)
      n += std::popcount(w);
    return n;
  }
  IndexSet &operator&=(const IndexSet &o) {
    for (std::size_t k = 0; k < words_.size(); ++k)
      words_[k] &= o.words_[k];
    return *this;
  }
  void remove_all(const IndexSet &o) {
    for (std::size_t k = 0; k < words_.size(); ++k)
      words_[k] &= ~o.words_[k];
  }
  bool subset_of(const IndexSet &o) const {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~o.words_[k])
        return false;
    return true;
  }
  std::vector<int> members() const {
    std::vector<int> out;
    for (std::size_t k = 0; k < words_.size(); ++k)
      for (auto w = words_[k]; w; w &= w - 1)
        out.push_back(static_cast<int>(k * 64) + std::countr_zero(w));
    return out;
  }

private:
  std::vector<std::uint64_t> words_;
};

/// Column-wise neuron masks of a matrix, with the cells of `used` removed.
class ColumnIndex {
public:
  ColumnIndex(const WeightMatrix &m, const CellMask &used) : m_(m) {
    ones_.assign(static_cast<std::size_t>(m.cols()), IndexSet(m.rows()));
    zeros_.assign(static_cast<std::size_t>(m.cols()), IndexSet(m.rows()));
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) {
        if (used.test(r, c))
          continue;
        if (m.at(r, c) == Cell::One)
          ones_[c].insert(r);
        else if (m.at(r, c) == Cell::Zero)
          zeros_[c].insert(r);
      }
  }

  void mark_used(const Factoring &f) {
    IndexSet rows(m_.rows());
    for (int r : f.neurons)
      rows.insert(r);
    for (int c : f.inputs) {
      ones_[c].remove_all(rows);
      zeros_[c].remove_all(rows);
    }
  }

  /// Neurons whose unused weight on column c equals neuron i's weight
  /// there; empty if (i, c) is absent or used.
  IndexSet agreeing(int i, int c) const {
    switch (m_.at(i, c)) {
    case Cell::One:
      if (ones_[c].contains(i))
        return ones_[c];
      break;
    case Cell::Zero:
      if (zeros_[c].contains(i))
        return zeros_[c];
      break;
    case Cell::Absent:
      break;
    }
    return IndexSet(m_.rows());
  }

private:
  const WeightMatrix &m_;
  std::vector<IndexSet> ones_;
  std::vector<IndexSet> zeros_;
};

/// getFactoring over precomputed agreement sets. `base[c]` is the set of
/// neurons agreeing with neuron i on column c. Candidates whose saving
/// cannot exceed `floor` are skipped; this never changes which candidate
/// wins when the winner beats `floor`.
std::optional<Factoring> best_factoring(int i, int j, const std::vector<IndexSet> &base, long floor) {
  const int cols = static_cast<int>(base.size());
  std::vector<IndexSet> candidates(base);
  for (auto &s : candidates)
    s &= base[static_cast<std::size_t>(j)];

  std::vector<int> sizes(static_cast<std::size_t>(cols));
  for (int c = 0; c < cols; ++c)
    sizes[c] = candidates[c].size();

  long best = floor;
  int best_col = -1;
  for (int c = 0; c < cols; ++c) {
    // only candidates that still contain the requested cell qualify
    if (sizes[c] < 2 || !candidates[c].contains(i))
      continue;
    if (static_cast<long>(sizes[c] - 1) * cols <= best)
      continue;
    long covered = 0;
    for (int c2 = 0; c2 < cols; ++c2)
      if (sizes[c2] >= sizes[c] && candidates[c].subset_of(candidates[c2]))
        ++covered;
    const long sav = static_cast<long>(sizes[c] - 1) * covered;
    if (sav > best) {
      best = sav;
      best_col = c;
    }
  }
  if (best_col < 0)
    return std::nullopt;

  Factoring f;
  f.neurons = candidates[best_col].members();
  for (int c2 = 0; c2 < cols; ++c2)
    if (candidates[best_col].subset_of(candidates[c2]))
      f.inputs.push_back(c2);
  return f;
}

std::vector<IndexSet> agreement_sets(const ColumnIndex &index, int i, int cols) {
  std::vector<IndexSet> base;
  base.reserve(static_cast<std::size_t>(cols));
  for (int c = 0; c < cols; ++c)
    base.push_back(index.agreeing(i, c));
  return base;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

} // namespace

// --- WeightMatrix ---------------------------------------------------------

WeightMatrix::WeightMatrix(int rows, int cols, Cell fill)
    : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0)
    throw ShapeError("matrix dimensions must be non-negative");
}

WeightMatrix WeightMatrix::from_layer(const Layer &layer) {
  WeightMatrix m(layer.neurons(), layer.fan_in());
  for (int i = 0; i < layer.neurons(); ++i)
    for (int j = 0; j < layer.fan_in(); ++j)
      m.set(i, j, layer.weight(i, j) > 0 ? Cell::One : Cell::Zero);
  return m;
}

WeightMatrix WeightMatrix::from_rows(const std::vector<std::string> &rows) {
  const int cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  WeightMatrix m(static_cast<int>(rows.size()), cols);
  for (int r = 0; r < m.rows(); ++r) {
    if (static_cast<int>(rows[r].size()) != cols)
      throw ShapeError("matrix rows have different lengths");
    for (int c = 0; c < cols; ++c) {
      switch (rows[r][c]) {
      case '0': m.set(r, c, Cell::Zero); break;
      case '1': m.set(r, c, Cell::One); break;
      case '.': m.set(r, c, Cell::Absent); break;
      default: throw ParseError(fmt::format("bad matrix cell '{}'", rows[r][c]));
      }
    }
  }
  return m;
}

// Matrix text format: "matrix <rows> <cols>" followed by one line per row
// of space separated cells 0, 1 or '.' (no link).
WeightMatrix parse_weight_matrix(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : line) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!cur.empty())
          toks.push_back(std::exchange(cur, {}));
      } else {
        cur += ch;
      }
    }
    if (!cur.empty())
      toks.push_back(cur);
    if (!toks.empty())
      lines.push_back(std::move(toks));
    if (end == text.size())
      break;
  }
  if (lines.empty() || lines[0].size() != 3 || lines[0][0] != "matrix")
    throw ParseError("expected 'matrix <rows> <cols>' header");
  int rows = 0, cols = 0;
  try {
    rows = std::stoi(lines[0][1]);
    cols = std::stoi(lines[0][2]);
  } catch (const std::exception &) {
    throw ParseError("bad matrix header");
  }
  if (static_cast<int>(lines.size()) != rows + 1)
    throw ShapeError(fmt::format("matrix declares {} rows, found {}", rows, lines.size() - 1));
  std::vector<std::string> raw;
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(lines[r + 1].size()) != cols)
      throw ShapeError(fmt::format("matrix row {} has {} cells, expected {}", r + 1,
                                   lines[r + 1].size(), cols));
    std::string row;
    for (const auto &tok : lines[r + 1]) {
      if (tok.size() != 1)
        throw ParseError(fmt::format("bad matrix cell '{}'", tok));
      row += tok;
    }
    raw.push_back(row);
  }
  auto m = WeightMatrix::from_rows(raw);
  return rows == 0 ? WeightMatrix(0, cols) : m;
}

std::string serialize_weight_matrix(const WeightMatrix &m) {
  std::string out = fmt::format("matrix {} {}\n", m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c)
        out += ' ';
      out += m.at(r, c) == Cell::One ? '1' : m.at(r, c) == Cell::Zero ? '0' : '.';
    }
    out += '\n';
  }
  return out;
}

// --- factorings -------------------------------------------------------------

long saving(const Factoring &f) {
  if (f.neurons.empty())
    return 0;
  return static_cast<long>(f.neurons.size() - 1) * static_cast<long>(f.inputs.size());
}

bool non_overlapping(const Factoring &a, const Factoring &b) {
  auto intersects = [](const std::vector<int> &x, const std::vector<int> &y) {
    return std::any_of(x.begin(), x.end(),
                       [&](int v) { return std::find(y.begin(), y.end(), v) != y.end(); });
  };
  return !(intersects(a.neurons, b.neurons) && intersects(a.inputs, b.inputs));
}

std::size_t CellMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void FactoringSet::add(Factoring f) {
  f.neurons = sorted_unique(std::move(f.neurons));
  f.inputs = sorted_unique(std::move(f.inputs));
  for (int r : f.neurons)
    if (r < 0 || r >= used_.rows())
      throw ShapeError(fmt::format("factoring neuron {} out of range", r));
  for (int c : f.inputs)
    if (c < 0 || c >= used_.cols())
      throw ShapeError(fmt::format("factoring input {} out of range", c));
  for (int r : f.neurons)
    for (int c : f.inputs)
      if (used_.test(r, c))
        throw ShapeError(fmt::format("factoring overlaps cell ({}, {})", r, c));
  for (int r : f.neurons)
    for (int c : f.inputs)
      used_.set(r, c);
  factorings_.push_back(std::move(f));
}

long FactoringSet::total_saving() const {
  long total = 0;
  for (const auto &f : factorings_)
    total += saving(f);
  return total;
}

bool is_valid_factoring(const WeightMatrix &m, const Factoring &f) {
  if (f.neurons.size() < 2)
    return false;
  for (int r : f.neurons)
    if (r < 0 || r >= m.rows())
      return false;
  for (int c : f.inputs) {
    if (c < 0 || c >= m.cols())
      return false;
    const Cell ref = m.at(f.neurons.front(), c);
    if (ref == Cell::Absent)
      return false;
    for (int r : f.neurons)
      if (m.at(r, c) != ref)
        return false;
  }
  return true;
}

bool is_valid_factoring_set(const WeightMatrix &m, const FactoringSet &set) {
  const auto &fs = set.factorings();
  for (std::size_t a = 0; a < fs.size(); ++a) {
    if (!is_valid_factoring(m, fs[a]))
      return false;
    for (std::size_t b = a + 1; b < fs.size(); ++b)
      if (!non_overlapping(fs[a], fs[b]))
        return false;
  }
  CellMask expected(m.rows(), m.cols());
  for (const auto &f : fs)
    for (int r : f.neurons)
      for (int c : f.inputs)
        expected.set(r, c);
  return expected == set.used();
}

std::optional<Factoring> get_factoring(const WeightMatrix &m, int neuron, int column,
                                       const CellMask &used) {
  if (neuron < 0 || neuron >= m.rows() || column < 0 || column >= m.cols())
    throw ShapeError(fmt::format("cell ({}, {}) outside {}x{} matrix", neuron, column, m.rows(), m.cols()));
  if (used.rows() != m.rows() || used.cols() != m.cols())
    throw ShapeError("used mask does not match the matrix");
  if (used.test(neuron, column) || !m.present(neuron, column))
    throw ShapeError(fmt::format("cell ({}, {}) is already used or has no weight", neuron, column));
  ColumnIndex index(m, used);
  return best_factoring(neuron, column, agreement_sets(index, neuron, m.cols()), 0);
}

FactoringSet find_factorings(const WeightMatrix &m) {
  FactoringSet result(m.rows(), m.cols());
  ColumnIndex index(m, result.used());
  for (int i = 0; i < m.rows(); ++i) {
    // `used` stays frozen while neuron i is scanned
    const auto base = agreement_sets(index, i, m.cols());
    std::optional<Factoring> best;
    long best_saving = 0;
    for (int j = 0; j < m.cols(); ++j) {
      if (!base[j].contains(i))
        continue;
      auto f = best_factoring(i, j, base, best_saving);
      if (f && saving(*f) > best_saving) {
        best_saving = saving(*f);
        best = std::move(f);
      }
    }
    if (best) {
      index.mark_used(*best);
      result.add(std::move(*best));
    }
  }
  return result;
}

FactoringSet find_factorings_partitioned(const WeightMatrix &m, BlockSize block) {
  if (block.rows < 1 || block.cols < 1)
    throw ShapeError("partition block sizes must be positive");

  struct Block {
    int r0, c0, rows, cols;
  };
  std::vector<Block> blocks;
  for (int r0 = 0; r0 < m.rows(); r0 += block.rows)
    for (int c0 = 0; c0 < m.cols(); c0 += block.cols)
      blocks.push_back({r0, c0, std::min(block.rows, m.rows() - r0), std::min(block.cols, m.cols() - c0)});

  auto run = [&m](Block b) {
    WeightMatrix sub(b.rows, b.cols);
    for (int r = 0; r < b.rows; ++r)
      for (int c = 0; c < b.cols; ++c)
        sub.set(r, c, m.at(b.r0 + r, b.c0 + c));
    const FactoringSet found = find_factorings(sub);
    std::vector<Factoring> out;
    for (auto f : found.factorings()) {
      for (int &r : f.neurons)
        r += b.r0;
      for (int &c : f.inputs)
        c += b.c0;
      out.push_back(std::move(f));
    }
    return out;
  };

  std::vector<std::future<std::vector<Factoring>>> jobs;
  jobs.reserve(blocks.size());
  for (const auto &b : blocks)
    jobs.push_back(std::async(blocks.size() > 1 ? std::launch::async : std::launch::deferred, run, b));

  FactoringSet merged(m.rows(), m.cols());
  for (auto &job : jobs)
    for (auto &f : job.get())
      merged.add(std::move(f));
  return merged;
}

OptimalFactorings brute_force_optimal_factorings(const WeightMatrix &m, int k) {
  if (k < 0)
    throw ShapeError("k must be non-negative");
  if (m.rows() > 8 || m.cols() > 8)
    throw InstanceTooLarge(fmt::format("brute force limited to 8x8 matrices, got {}x{}", m.rows(), m.cols()));

  // Every candidate neuron set with its maximal agreement column mask.
  struct Candidate {
    unsigned rows;
    unsigned cols;
    long weight; // |I| - 1
  };
  std::vector<Candidate> candidates;
  for (unsigned mask = 1; mask < (1U << m.rows()); ++mask) {
    if (std::popcount(mask) < 2)
      continue;
    unsigned cols = 0;
    const int first = std::countr_zero(mask);
    for (int c = 0; c < m.cols(); ++c) {
      const Cell ref = m.at(first, c);
      if (ref == Cell::Absent)
        continue;
      bool agree = true;
      for (int r = 0; r < m.rows() && agree; ++r)
        if ((mask >> r & 1U) && m.at(r, c) != ref)
          agree = false;
      if (agree)
        cols |= 1U << c;
    }
    if (cols)
      candidates.push_back({mask, cols, std::popcount(mask) - 1L});
  }

  OptimalFactorings best{FactoringSet(m.rows(), m.cols()), 0};
  const int picks = std::min<int>(k, static_cast<int>(candidates.size()));
  if (picks == 0)
    return best;

  // C(n, picks) guard
  double combos = 1;
  for (int t = 0; t < picks; ++t)
    combos = combos * (static_cast<double>(candidates.size()) - t) / (t + 1);
  if (combos > 2e7)
    throw InstanceTooLarge(fmt::format("brute force over {:.0f} factoring combinations refused", combos));

  // For a fixed choice of neuron sets, columns are independent: each column
  // goes to a pairwise row-disjoint subset of the sets that agree there.
  std::vector<int> pick(static_cast<std::size_t>(picks));
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<unsigned> best_assignment;
  std::vector<int> best_pick;
  std::vector<unsigned> assignment(static_cast<std::size_t>(m.cols()));

  auto evaluate = [&]() {
    long total = 0;
    for (int c = 0; c < m.cols(); ++c) {
      long col_best = 0;
      unsigned col_choice = 0;
      for (unsigned sub = 1; sub < (1U << picks); ++sub) {
        unsigned seen_rows = 0;
        long w = 0;
        bool ok = true;
        for (int t = 0; t < picks && ok; ++t) {
          if (!(sub >> t & 1U))
            continue;
          const auto &cand = candidates[static_cast<std::size_t>(pick[t])];
          if (!(cand.cols >> c & 1U) || (cand.rows & seen_rows))
            ok = false;
          seen_rows |= cand.rows;
          w += cand.weight;
        }
        if (ok && w > col_best) {
          col_best = w;
          col_choice = sub;
        }
      }
      assignment[c] = col_choice;
      total += col_best;
    }
    if (total > best.total_saving) {
      best.total_saving = total;
      best_assignment = assignment;
      best_pick = pick;
    }
  };

  const int n = static_cast<int>(candidates.size());
  while (true) {
    evaluate();
    int t = picks - 1;
    while (t >= 0 && pick[t] == n - picks + t)
      --t;
    if (t < 0)
      break;
    ++pick[t];
    for (int u = t + 1; u < picks; ++u)
      pick[u] = pick[u - 1] + 1;
  }

  for (int t = 0; t < picks && !best_pick.empty(); ++t) {
    Factoring f;
    const auto &cand = candidates[static_cast<std::size_t>(best_pick[t])];
    for (int r = 0; r < m.rows(); ++r)
      if (cand.rows >> r & 1U)
        f.neurons.push_back(r);
    for (int c = 0; c < m.cols(); ++c)
      if (best_assignment[c] >> t & 1U)
        f.inputs.push_back(c);
    if (!f.inputs.empty())
      best.set.add(std::move(f));
  }
  return best;
}

// --- bipartite graphs ---------------------------------------------------------

bool BipartiteGraph::has_edge(int a, int b) const {
  return std::find(edges.begin(), edges.end(), std::pair{a, b}) != edges.end();
}

// Graph text format: "bipartite <left> <right>" then one "e <a> <b>" line per
// edge with 1-based vertex numbers on each side.
BipartiteGraph parse_bipartite_graph(std::string_view text) {
  BipartiteGraph g;
  bool header = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : line + ' ') {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!cur.empty())
          toks.push_back(std::exchange(cur, {}));
      } else {
        cur += ch;
      }
    }
    if (toks.empty())
      continue;
    auto num = [&](const std::string &s) {
      int v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError(fmt::format("graph line {}: expected an integer, got '{}'", line_no, s));
      return v;
    };
    if (!header) {
      if (toks.size() != 3 || toks[0] != "bipartite")
        throw ParseError(fmt::format("graph line {}: expected 'bipartite <left> <right>'", line_no));
      g.left = num(toks[1]);
      g.right = num(toks[2]);
      if (g.left < 0 || g.right < 0)
        throw ShapeError("vertex counts must be non-negative");
      header = true;
      continue;
    }
    if (toks.size() != 3 || toks[0] != "e")
      throw ParseError(fmt::format("graph line {}: expected 'e <a> <b>'", line_no));
    const int a = num(toks[1]), b = num(toks[2]);
    if (a < 1 || a > g.left || b < 1 || b > g.right)
      throw ShapeError(fmt::format("graph line {}: edge ({}, {}) references a missing vertex", line_no, a, b));
    if (!g.has_edge(a - 1, b - 1))
      g.edges.emplace_back(a - 1, b - 1);
  }
  if (!header)
    throw ParseError("empty graph file");
  return g;
}

std::string serialize_bipartite_graph(const BipartiteGraph &g) {
  std::string out = fmt::format("bipartite {} {}\n", g.left, g.right);
  for (auto [a, b] : g.edges)
    out += fmt::format("e {} {}\n", a + 1, b + 1);
  return out;
}

WeightMatrix reduce_meb_to_factoring(const BipartiteGraph &g) {
  if (g.left < 1 || g.right < 1)
    throw ShapeError("reduction needs a nonempty graph");
  WeightMatrix m(g.left + 1, g.right, Cell::Absent);
  for (int b = 0; b < g.right; ++b)
    m.set(0, b, Cell::One);
  for (auto [a, b] : g.edges) {
    if (a < 0 || a >= g.left || b < 0 || b >= g.right)
      throw ShapeError(fmt::format("edge ({}, {}) references a missing vertex", a, b));
    m.set(a + 1, b, Cell::One);
  }
  return m;
}

Biclique brute_force_max_edge_biclique(const BipartiteGraph &g) {
  if (g.left > 12 || g.right > 12)
    throw InstanceTooLarge(fmt::format("biclique brute force limited to 12+12 vertices, got {}+{}",
                                       g.left, g.right));
  std::vector<unsigned> neighbours(static_cast<std::size_t>(g.left), 0);
  for (auto [a, b] : g.edges)
    neighbours[a] |= 1U << b;

  Biclique best;
  for (unsigned mask = 1; mask < (1U << g.left); ++mask) {
    unsigned common = (1U << g.right) - 1;
    for (int a = 0; a < g.left; ++a)
      if (mask >> a & 1U)
        common &= neighbours[a];
    const long edges = static_cast<long>(std::popcount(mask)) * std::popcount(common);
    if (edges > best.edges) {
      best.edges = edges;
      best.left.clear();
      best.right.clear();
      for (int a = 0; a < g.left; ++a)
        if (mask >> a & 1U)
          best.left.push_back(a);
      for (int b = 0; b < g.right; ++b)
        if (common >> b & 1U)
          best.right.push_back(b);
    }
  }
  return best;
}

// --- whole-model factoring ------------------------------------------------------

FactoringMode parse_factoring_mode(std::string_view s) {
  if (s == "off")
    return FactoringMode::Off;
  if (s == "heuristic")
    return FactoringMode::Heuristic;
  if (s == "partitioned")
    return FactoringMode::Partitioned;
  throw ParseError(fmt::format("unknown factoring mode '{}'", s));
}

std::string_view to_string(FactoringMode mode) {
  switch (mode) {
  case FactoringMode::Off: return "off";
  case FactoringMode::Heuristic: return "heuristic";
  case FactoringMode::Partitioned: return "partitioned";
  }
  return "?";
}

ModelFactoring empty_factoring(const BnnModel &model) {
  ModelFactoring out;
  for (const auto &layer : model.layers())
    out.emplace_back(layer.neurons(), layer.fan_in());
  return out;
}

ModelFactoring factor_model(const BnnModel &model, FactoringMode mode, BlockSize block) {
  if (mode == FactoringMode::Off)
    return empty_factoring(model);
  ModelFactoring out;
  for (const auto &layer : model.layers()) {
    const auto m = WeightMatrix::from_layer(layer);
    out.push_back(mode == FactoringMode::Heuristic ? find_factorings(m)
                                                   : find_factorings_partitioned(m, block));
  }
  return out;
}

long total_saving(const ModelFactoring &f) {
  long total = 0;
  for (const auto &set : f)
    total += set.total_saving();
  return total;
}

std::string factoring_report(const ModelFactoring &f) {
  auto list = [](const std::vector<int> &v, int shift) {
    std::string s = "{";
    for (std::size_t k = 0; k < v.size(); ++k)
      s += fmt::format("{}{}", k ? "," : "", v[k] + shift);
    return s + "}";
  };
  std::string out;
  for (std::size_t l = 0; l < f.size(); ++l) {
    for (const auto &fac : f[l].factorings())
      out += fmt::format("layer {} I={} J={} saving {}\n", l + 1, list(fac.neurons, 1),
                         list(fac.inputs, 0), saving(fac));
    out += fmt::format("layer {} total {} factorings {}\n", l + 1, f[l].total_saving(), f[l].size());
  }
  out += fmt::format("total saving {}\n", total_saving(f));
  return out;
}

} // namespace bnnv
