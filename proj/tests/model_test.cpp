#include "bnnv/error.hpp"
#include "bnnv/model.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bnnv;

namespace {

// Single neuron over four inputs; row = bias weight, then the input weights.
BnnModel worked_neuron() { return BnnModel({Layer(4, 1, {-1, 1, -1, -1, 1})}); }

TEST(Model, WorkedNeuronBipolar) {
  const std::vector<Bipolar> x = {1, -1, 1, 1};
  const auto e = eval_bipolar(worked_neuron(), x);
  ASSERT_EQ(e.outputs.size(), 1u);
  EXPECT_EQ(e.outputs[0], 1);
}

TEST(Model, WorkedNeuronBoolean) {
  const std::vector<Bit> x = {1, 0, 1, 1};
  const auto e = eval_boolean(worked_neuron(), x);
  ASSERT_EQ(e.output_counts.size(), 1u);
  EXPECT_EQ(e.output_counts[0], 3);
  EXPECT_GE(e.output_counts[0], activation_threshold(5));
  EXPECT_EQ(convert_domain(3, 5), 1);
}

TEST(Model, ActivationThreshold) {
  EXPECT_EQ(activation_threshold(1), 1);
  EXPECT_EQ(activation_threshold(4), 2);
  EXPECT_EQ(activation_threshold(5), 3);
}

TEST(Model, ConvertDomainExhaustive) {
  for (int n = 1; n <= 10; ++n) {
    for (unsigned w = 0; w < (1u << n); ++w) {
      for (unsigned x = 0; x < (1u << n); ++x) {
        int sum = 0, count = 0;
        for (int k = 0; k < n; ++k) {
          const int wb = (w >> k) & 1, xb = (x >> k) & 1;
          sum += to_bipolar(wb) * to_bipolar(xb);
          count += wb == xb;
        }
        ASSERT_EQ(convert_domain(count, n), sum);
      }
    }
  }
}

TEST(Model, DomainsAgreeOnRandomModels) {
  std::mt19937_64 rng(7);
  const std::vector<int> dims = {9, 6, 5, 3};
  for (int trial = 0; trial < 20; ++trial) {
    const BnnModel m = random_model(dims, rng);
    for (unsigned v = 0; v < (1u << 9); ++v) {
      std::vector<Bit> bits(9);
      for (int k = 0; k < 9; ++k)
        bits[k] = (v >> k) & 1;
      const auto b = eval_boolean(m, bits);
      const auto p = eval_bipolar(m, bits_to_bipolar(bits));
      for (std::size_t l = 0; l < b.hidden.size(); ++l)
        ASSERT_EQ(b.hidden[l], bipolar_to_bits(p.hidden[l]));
      for (std::size_t i = 0; i < b.output_counts.size(); ++i)
        ASSERT_EQ(convert_domain(b.output_counts[i], m.output_fan_in()), p.outputs[i]);
    }
  }
}

TEST(Model, BiasDominatedNeuron) {
  // fan-in 2 with bias weight +1: count is 1 + [x == 1] >= ceil(2/2)
  const BnnModel m({Layer(1, 1, {1, 1}), Layer(1, 1, {1, 1})});
  for (Bit b : {Bit{0}, Bit{1}}) {
    const std::vector<Bit> x = {b};
    const auto e = eval_boolean(m, x);
    EXPECT_EQ(e.hidden[0][0], 1);
    EXPECT_EQ(e.output_counts[0], 2);
  }
}

TEST(Model, ParseSerializeRoundTrip) {
  std::mt19937_64 rng(3);
  const std::vector<int> dims = {5, 4, 2};
  const BnnModel m = random_model(dims, rng);
  EXPECT_EQ(parse_model(serialize_model(m)), m);
}

TEST(Model, ParseWithComments) {
  const auto m = parse_model("# tiny\nlayers 1\ndims 2 1\nweights 1\n1 -1 1 # row\n");
  EXPECT_EQ(m.dims(), (std::vector<int>{2, 1}));
  EXPECT_EQ(m.layer(1).weight(0, 1), -1);
}

TEST(Model, RejectsZeroWeight) {
  EXPECT_THROW(parse_model("layers 1\ndims 2 1\nweights 1\n1 0 1\n"), ShapeError);
}

TEST(Model, RejectsMalformedText) {
  EXPECT_THROW(parse_model("layers 1\ndims 2\n"), Error);
  EXPECT_THROW(parse_model("layers x\n"), Error);
  EXPECT_THROW(parse_model("layers 1\ndims 2 1\nweights 1\n1 1\n"), Error);
}

TEST(Model, RejectsBadShapes) {
  EXPECT_THROW(BnnModel({}), ShapeError);
  EXPECT_THROW(BnnModel({Layer(3, 2), Layer(3, 1)}), ShapeError);
  const BnnModel m({Layer(2, 1)});
  const std::vector<Bit> short_input = {1};
  EXPECT_THROW(eval_boolean(m, short_input), ShapeError);
  const std::vector<Bipolar> zero = {0, 1};
  EXPECT_THROW(eval_bipolar(m, zero), ShapeError);
  const std::vector<Bit> two = {2, 1};
  EXPECT_THROW(eval_boolean(m, two), ShapeError);
}

} // namespace
