#include "bnnv/error.hpp"
#include "bnnv/pipeline.hpp"
#include "bnnv/reductions.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bnnv;

namespace {

TEST(Sat3, WorkedClauseWeightedSum) {
  // (x3 | !x5 | x6) over six variables
  const Cnf3Instance inst{6, {{3, -5, 6}}};
  const auto r = sat3_to_bnn(inst);
  ASSERT_EQ(r.model.layer_count(), 1);
  for (unsigned v = 0; v < (1u << 7); ++v) {
    // assignment of x1..x7, copies kept consistent
    std::vector<Bipolar> x(static_cast<std::size_t>(r.model.input_width()));
    std::vector<int> val(8);
    for (int i = 1; i <= 7; ++i) {
      val[i] = (v >> (i - 1)) & 1 ? 1 : -1;
      for (int k = 0; k < r.copies[i - 1]; ++k)
        x[r.first_input[i - 1] + k] = static_cast<Bipolar>(val[i]);
    }
    const int s = (-val[3] + val[5] - val[6]) - val[7] - 1;
    const int im = eval_bipolar(r.model, x).outputs[0];
    ASSERT_EQ(im, 2 * s + 1);
    ASSERT_EQ(im >= 0, s >= 0);
  }
}

TEST(Sat3, ClauseNeuronSignTracksSatisfaction) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_cnf3(5, 4, rng);
    const auto r = sat3_to_bnn(inst);
    for (unsigned v = 0; v < 32; ++v) {
      std::vector<bool> a(5);
      for (int i = 0; i < 5; ++i)
        a[i] = (v >> i) & 1;
      const auto x = encode_sat3_assignment(r, a);
      const auto e = eval_bipolar(r.model, x);
      for (std::size_t j = 0; j < inst.clauses.size(); ++j) {
        const Cnf3Instance one{5, {inst.clauses[j]}};
        ASSERT_EQ(e.outputs[j] < 0, eval_cnf3(one, a));
      }
      const auto bits = bipolar_to_bits(x);
      ASSERT_EQ(eval_property(r.property, bits, eval_boolean(r.model, bits).output_counts), eval_cnf3(inst, a));
    }
  }
}

TEST(Sat3, SwitchInputOffFalsifiesProperty) {
  const Cnf3Instance inst{2, {{1, 2, -1}}};
  const auto r = sat3_to_bnn(inst);
  auto x = encode_sat3_assignment(r, {true, true});
  for (int k = 0; k < r.copies[2]; ++k)
    x[r.first_input[2] + k] = -1;
  const auto bits = bipolar_to_bits(x);
  EXPECT_FALSE(eval_property(r.property, bits, eval_boolean(r.model, bits).output_counts));
}

TEST(Sat3, RepeatedLiteralInstance) {
  const Cnf3Instance inst{1, {{1, 1, 1}}};
  const auto r = sat3_to_bnn(inst);
  const auto v = verify(r.model, r.property, {});
  ASSERT_EQ(v.verdict, Verdict::Sat);
  const auto a = decode_sat3_witness(r, *v.counterexample);
  EXPECT_EQ(a, (std::vector<bool>{true}));
}

TEST(Sat3, UnsatisfiablePaddedInstance) {
  const auto inst = parse_cnf3("p cnf 1 2\n1 0\n-1 0\n");
  EXPECT_EQ(inst.clauses[0], (std::array<int, 3>{1, 1, 1}));
  const auto r = sat3_to_bnn(inst);
  const auto v = verify(r.model, r.property, {});
  EXPECT_EQ(v.verdict, Verdict::Unsat);
  EXPECT_FALSE(v.counterexample);
}

TEST(Sat3, RandomInstancesMatchEnumeration) {
  std::mt19937_64 rng(107);
  int sat = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::uniform_int_distribution<int> m(1, 8), n(1, 12);
    const auto inst = random_cnf3(m(rng), n(rng), rng);
    const bool oracle = brute_force_cnf3(inst);
    const auto r = sat3_to_bnn(inst);
    const auto v = verify(r.model, r.property, {});
    ASSERT_EQ(v.verdict, oracle ? Verdict::Sat : Verdict::Unsat) << serialize_cnf3(inst);
    if (oracle) {
      ++sat;
      ASSERT_TRUE(eval_cnf3(inst, decode_sat3_witness(r, *v.counterexample)));
    }
  }
  EXPECT_GT(sat, 10);
}

TEST(Sat3, Validation) {
  EXPECT_THROW(validate(Cnf3Instance{2, {{1, 3, 2}}}), ShapeError);
  EXPECT_THROW(validate(Cnf3Instance{2, {{1, 0, 2}}}), ShapeError);
  EXPECT_THROW(parse_cnf3("p cnf 4 1\n1 2 3 4 0\n"), ParseError);
  EXPECT_THROW(parse_cnf3("p cnf 4 1\n0\n"), ParseError);
  const Cnf3Instance inst{3, {{1, -2, 3}}};
  EXPECT_EQ(parse_cnf3(serialize_cnf3(inst)).clauses, inst.clauses);
}

TEST(Sat3, DecodeRejectsForeignVectors) {
  const auto r = sat3_to_bnn(Cnf3Instance{2, {{1, 2, 2}}});
  const std::vector<Bipolar> wrong(3, 1);
  EXPECT_THROW(decode_sat3_witness(r, wrong), ShapeError);
}

} // namespace
