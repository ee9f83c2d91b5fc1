#include "bnnv/error.hpp"
#include "bnnv/property.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bnnv;
using bnnv::testing::random_property;

namespace {

TEST(Property, ParsesThresholdConjunction) {
  const Property p = parse_property("out[1] >= 18 && out[2] >= 18");
  EXPECT_EQ(p, out_ge(1, 18) && out_ge(2, 18));
}

TEST(Property, ParsesImplicationWithInputAtom) {
  const Property p = parse_property("in[8] == 1 -> out[1] <= 0");
  EXPECT_EQ(p, (implies(InputAtom{8, 1}, OutputAtom{1, Relation::Le, 0})));
}

TEST(Property, Precedence) {
  EXPECT_EQ(parse_property("out[1] > 1 || out[2] < 2 && !in[1] == 0"),
            (Property(OutputAtom{1, Relation::Gt, 1}) ||
             (Property(OutputAtom{2, Relation::Lt, 2}) && !Property(InputAtom{1, 0}))));
  EXPECT_EQ(parse_property("in[1] == 1 -> in[2] == 1 -> in[3] == 1"),
            (implies(InputAtom{1, 1}, implies(InputAtom{2, 1}, InputAtom{3, 1}))));
  EXPECT_EQ(parse_property("out[1]==2||out[1]==3||out[1]==4"),
            ((Property(OutputAtom{1, Relation::Eq, 2}) || OutputAtom{1, Relation::Eq, 3}) ||
             OutputAtom{1, Relation::Eq, 4}));
}

TEST(Property, SyntaxErrors) {
  for (const char *bad : {"out[] >= ", "out[1] >=", "out[0] >= 1", "in[1] == 2", "out[1] >= 1 &&",
                          "(out[1] >= 1", "out[1] => 1", "out[1] >= 1 out[2] >= 1", ""})
    EXPECT_THROW(parse_property(bad), ParseError) << bad;
}

TEST(Property, PrintParseRoundTrip) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const Property p = random_property(rng, 4, 6, 3, 10);
    const std::string text = print_property(p);
    ASSERT_EQ(parse_property(text), p) << text;
    ASSERT_EQ(print_property(parse_property(text)), text);
  }
}

TEST(Property, EvalAtoms) {
  const std::vector<Bit> in = {1, 0};
  const std::vector<int> out = {3};
  EXPECT_TRUE(eval_property(out_ge(1, 3), in, out));
  EXPECT_FALSE(eval_property(out_ge(1, 4), in, out));
  EXPECT_TRUE(eval_property(parse_property("in[1] == 1 && in[2] == 0"), in, out));
  EXPECT_TRUE(eval_property(parse_property("in[2] == 1 -> out[1] < 0"), in, out));
  EXPECT_TRUE(eval_property(parse_property("out[1] == 3 && out[1] <= 3 && !(out[1] > 3)"), in, out));
  EXPECT_THROW(eval_property(out_ge(2, 1), in, out), ShapeError);
}

TEST(Property, ThresholdMonotone) {
  const std::vector<Bit> in;
  for (int v = 0; v <= 12; ++v) {
    const std::vector<int> out = {v};
    for (int c = 0; c <= 13; ++c)
      if (eval_property(out_ge(1, c), in, out))
        for (int c2 = 0; c2 <= c; ++c2)
          ASSERT_TRUE(eval_property(out_ge(1, c2), in, out));
  }
}

TEST(Property, ValidateAgainstModel) {
  const BnnModel m({Layer(3, 2)});
  EXPECT_NO_THROW(validate_property(parse_property("out[2] >= 5 && in[3] == 0"), m));
  EXPECT_THROW(validate_property(parse_property("out[3] >= 1"), m), ShapeError);
  EXPECT_THROW(validate_property(parse_property("in[4] == 1"), m), ShapeError);
  EXPECT_THROW(validate_property(parse_property("out[1] >= 6"), m), ShapeError);
  const auto e = property_extent(parse_property("in[3] == 1 || out[2] < 1"));
  EXPECT_EQ(e.max_input, 3);
  EXPECT_EQ(e.max_output, 2);
}

} // namespace
