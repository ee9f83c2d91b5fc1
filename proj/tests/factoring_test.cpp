#include "bnnv/error.hpp"
#include "bnnv/factoring.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <random>
#include <set>

using namespace bnnv;

namespace {

WeightMatrix random_matrix(int rows, int cols, std::mt19937_64 &rng, double absent = 0.0) {
  WeightMatrix m(rows, cols);
  std::bernoulli_distribution one(0.5), gap(absent);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m.set(r, c, gap(rng) ? Cell::Absent : one(rng) ? Cell::One : Cell::Zero);
  return m;
}

// Straight transcription of the candidate construction with std::set, used
// as a second implementation of get_factoring.
long naive_get_factoring_saving(const WeightMatrix &m, int i, int j, const CellMask &used) {
  auto agree = [&](int c) {
    std::set<int> s;
    if (used.test(i, c) || !m.present(i, c))
      return s;
    for (int r = 0; r < m.rows(); ++r)
      if (!used.test(r, c) && m.at(r, c) == m.at(i, c))
        s.insert(r);
    return s;
  };
  const auto ij = agree(j);
  std::vector<std::set<int>> cand;
  for (int c = 0; c < m.cols(); ++c) {
    std::set<int> s;
    for (int r : agree(c))
      if (ij.count(r))
        s.insert(r);
    cand.push_back(s);
  }
  long best = 0;
  for (int c = 0; c < m.cols(); ++c) {
    if (cand[c].size() < 2 || !cand[c].count(i))
      continue;
    long cover = 0;
    for (int c2 = 0; c2 < m.cols(); ++c2)
      if (std::includes(cand[c2].begin(), cand[c2].end(), cand[c].begin(), cand[c].end()))
        ++cover;
    best = std::max(best, static_cast<long>(cand[c].size() - 1) * cover);
  }
  return best;
}

// Best single factoring containing cell (i, j), by enumerating neuron sets.
long optimal_saving_through(const WeightMatrix &m, int i, int j) {
  long best = 0;
  for (unsigned mask = 0; mask < (1u << m.rows()); ++mask) {
    if (!(mask & (1u << i)) || std::popcount(mask) < 2)
      continue;
    long cols = 0;
    bool has_j = false;
    for (int c = 0; c < m.cols(); ++c) {
      bool ok = m.present(i, c);
      for (int r = 0; r < m.rows() && ok; ++r)
        if (mask & (1u << r))
          ok = m.at(r, c) == m.at(i, c);
      if (ok) {
        ++cols;
        has_j |= c == j;
      }
    }
    if (has_j)
      best = std::max(best, (std::popcount(mask) - 1L) * cols);
  }
  return best;
}

TEST(Factoring, SavingFormula) {
  EXPECT_EQ(saving({{0, 1}, {0, 2, 3}}), 3);
  EXPECT_EQ(saving({{0, 1, 2}, {4, 5}}), 4);
  EXPECT_EQ(saving({{3}, {1, 2, 3}}), 0);
}

TEST(Factoring, NonOverlap) {
  EXPECT_TRUE(non_overlapping({{0, 1}, {0, 1}}, {{0, 1}, {2, 3}}));
  EXPECT_TRUE(non_overlapping({{0, 1}, {0, 1}}, {{2, 3}, {0, 1}}));
  EXPECT_FALSE(non_overlapping({{0, 1}, {0, 1}}, {{1, 2}, {1, 2}}));
}

TEST(Factoring, SetRejectsOverlap) {
  FactoringSet s(3, 4);
  s.add({{0, 1}, {0, 1}});
  EXPECT_THROW(s.add({{1, 2}, {1, 3}}), ShapeError);
  EXPECT_THROW(s.add({{0, 5}, {3}}), ShapeError);
  EXPECT_EQ(s.total_saving(), 2);
}

TEST(Factoring, GetFactoringWorkedExample) {
  const auto m = WeightMatrix::from_rows({"1100", "1000", "0110"});
  const auto f = get_factoring(m, 0, 0, CellMask(3, 4));
  ASSERT_TRUE(f);
  EXPECT_EQ(f->neurons, (std::vector<int>{0, 1}));
  EXPECT_EQ(f->inputs, (std::vector<int>{0, 2, 3}));
  EXPECT_EQ(saving(*f), 3);
}

TEST(Factoring, GetFactoringRespectsUsed) {
  const auto m = WeightMatrix::from_rows({"1100", "1000", "0110"});
  CellMask used(3, 4);
  used.set(1, 2);
  const auto f = get_factoring(m, 0, 0, used);
  ASSERT_TRUE(f);
  EXPECT_EQ(saving(*f), 2);
  used.set(0, 0);
  EXPECT_THROW(get_factoring(m, 0, 0, used), ShapeError);
}

TEST(Factoring, GetFactoringNoPartner) {
  const auto m = WeightMatrix::from_rows({"11", "00"});
  EXPECT_FALSE(get_factoring(m, 0, 0, CellMask(2, 2)));
}

TEST(Factoring, HeuristicWorkedExample) {
  const auto m = WeightMatrix::from_rows({"010111", "000000", "101000"});
  const auto opt = brute_force_optimal_factorings(m, 2);
  EXPECT_EQ(opt.total_saving, 6);
  EXPECT_TRUE(is_valid_factoring_set(m, opt.set));
  const auto h = find_factorings(m);
  EXPECT_TRUE(is_valid_factoring_set(m, h));
  EXPECT_EQ(h.total_saving(), 6);
}

TEST(Factoring, GetFactoringMatchesNaive) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = random_matrix(2 + trial % 5, 2 + trial % 7, rng, trial % 3 == 0 ? 0.2 : 0.0);
    CellMask used(m.rows(), m.cols());
    std::bernoulli_distribution u(0.15);
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c)
        if (u(rng))
          used.set(r, c);
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) {
        if (used.test(i, j) || !m.present(i, j))
          continue;
        const auto f = get_factoring(m, i, j, used);
        const long expect = naive_get_factoring_saving(m, i, j, used);
        ASSERT_EQ(f ? saving(*f) : 0, expect);
        if (!f)
          continue;
        ASSERT_TRUE(is_valid_factoring(m, *f));
        ASSERT_TRUE(std::binary_search(f->neurons.begin(), f->neurons.end(), i));
        ASSERT_TRUE(std::binary_search(f->inputs.begin(), f->inputs.end(), j));
        for (int r : f->neurons)
          for (int c : f->inputs)
            ASSERT_FALSE(used.test(r, c));
      }
  }
}

TEST(Factoring, GetFactoringBoundedByOptimum) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(5, 6, rng);
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) {
        const auto f = get_factoring(m, i, j, CellMask(5, 6));
        ASSERT_LE(f ? saving(*f) : 0, optimal_saving_through(m, i, j));
      }
  }
}

TEST(Factoring, HeuristicValidAndBoundedByOptimum) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = random_matrix(2 + trial % 4, 3 + trial % 4, rng);
    const auto h = find_factorings(m);
    ASSERT_TRUE(is_valid_factoring_set(m, h));
    for (const auto &f : h.factorings())
      ASSERT_GT(saving(f), 0);
    const int k = std::max<int>(1, static_cast<int>(h.size()));
    ASSERT_LE(h.total_saving(), brute_force_optimal_factorings(m, k).total_saving);
  }
}

TEST(Factoring, HeuristicValidOnLargeMatrices) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = random_matrix(60, 90, rng);
    const auto h = find_factorings(m);
    EXPECT_TRUE(is_valid_factoring_set(m, h));
    EXPECT_GT(h.total_saving(), 0);
  }
}

TEST(Factoring, PartitionedStaysInsideBlocks) {
  std::mt19937_64 rng(29);
  const auto m = random_matrix(40, 70, rng);
  const BlockSize block{16, 32};
  const auto p = find_factorings_partitioned(m, block);
  EXPECT_TRUE(is_valid_factoring_set(m, p));
  for (const auto &f : p.factorings()) {
    EXPECT_EQ(f.neurons.front() / block.rows, f.neurons.back() / block.rows);
    EXPECT_EQ(f.inputs.front() / block.cols, f.inputs.back() / block.cols);
  }
  // a single block covering everything is the plain heuristic
  const auto whole = find_factorings_partitioned(m, {40, 70});
  EXPECT_EQ(whole.factorings(), find_factorings(m).factorings());
}

TEST(Factoring, BruteForceGuards) {
  EXPECT_THROW(brute_force_optimal_factorings(WeightMatrix(9, 3), 1), InstanceTooLarge);
  EXPECT_THROW(brute_force_optimal_factorings(WeightMatrix(3, 3), -1), ShapeError);
  EXPECT_EQ(brute_force_optimal_factorings(WeightMatrix(3, 3), 0).total_saving, 0);
}

TEST(Factoring, BruteForceSmallCases) {
  // all-equal 3x4 matrix: one factoring covering everything
  EXPECT_EQ(brute_force_optimal_factorings(WeightMatrix(3, 4), 1).total_saving, 8);
  // two disjoint row pairs; the second needs k = 2
  const auto m = WeightMatrix::from_rows({"1100", "1100", "0011", "0011"});
  EXPECT_EQ(brute_force_optimal_factorings(m, 1).total_saving, 4);
  EXPECT_EQ(brute_force_optimal_factorings(m, 2).total_saving, 8);
}

TEST(Factoring, MatrixTextRoundTrip) {
  const auto m = WeightMatrix::from_rows({"01.", "1.0"});
  EXPECT_EQ(parse_weight_matrix(serialize_weight_matrix(m)), m);
  EXPECT_THROW(parse_weight_matrix("matrix 1 2\n0 2\n"), ParseError);
  EXPECT_THROW(parse_weight_matrix("matrix 2 2\n0 1\n"), ShapeError);
}

TEST(Factoring, ModelLevel) {
  std::mt19937_64 rng(31);
  const std::vector<int> dims = {20, 12, 8};
  const auto model = random_model(dims, rng);
  const auto f = factor_model(model, FactoringMode::Heuristic);
  ASSERT_EQ(f.size(), 2u);
  for (int l = 1; l <= 2; ++l)
    EXPECT_TRUE(is_valid_factoring_set(WeightMatrix::from_layer(model.layer(l)), f[l - 1]));
  EXPECT_EQ(total_saving(factor_model(model, FactoringMode::Off)), 0);
  EXPECT_NE(factoring_report(f).find("total saving"), std::string::npos);
  EXPECT_EQ(parse_factoring_mode("partitioned"), FactoringMode::Partitioned);
  EXPECT_THROW(parse_factoring_mode("fast"), ParseError);
}

// --- biclique reduction -------------------------------------------------------

TEST(Biclique, WorkedExampleGraph) {
  // left 1..4, right 5..8 renumbered to 1..4
  const auto g = parse_bipartite_graph("bipartite 4 4\ne 1 2\ne 1 4\ne 2 2\ne 2 4\ne 3 1\ne 4 3\ne 3 3\n");
  const auto b = brute_force_max_edge_biclique(g);
  EXPECT_EQ(b.edges, 4);
  EXPECT_EQ(b.left, (std::vector<int>{0, 1}));
  EXPECT_EQ(b.right, (std::vector<int>{1, 3}));
  const auto m = reduce_meb_to_factoring(g);
  EXPECT_EQ(m.rows(), 5);
  EXPECT_EQ(brute_force_optimal_factorings(m, 1).total_saving, 4);
}

TEST(Biclique, ReductionEqualityOnRandomGraphs) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> side(1, 5);
    BipartiteGraph g{side(rng), side(rng), {}};
    std::bernoulli_distribution e(0.5);
    for (int a = 0; a < g.left; ++a)
      for (int b = 0; b < g.right; ++b)
        if (e(rng))
          g.edges.emplace_back(a, b);
    if (g.edges.empty())
      g.edges.emplace_back(0, 0);
    const auto m = reduce_meb_to_factoring(g);
    ASSERT_EQ(brute_force_max_edge_biclique(g).edges, brute_force_optimal_factorings(m, 1).total_saving);
  }
}

TEST(Biclique, GraphTextRoundTrip) {
  const BipartiteGraph g{2, 3, {{0, 2}, {1, 0}}};
  const auto h = parse_bipartite_graph(serialize_bipartite_graph(g));
  EXPECT_EQ(h.left, 2);
  EXPECT_EQ(h.right, 3);
  EXPECT_EQ(h.edges, g.edges);
  EXPECT_THROW(parse_bipartite_graph("bipartite 2 2\ne 3 1\n"), ShapeError);
  EXPECT_THROW(parse_bipartite_graph("graph 2 2\n"), ParseError);
}

TEST(Biclique, Guard) {
  EXPECT_THROW(brute_force_max_edge_biclique(BipartiteGraph{13, 2, {{0, 0}}}), InstanceTooLarge);
}

} // namespace
