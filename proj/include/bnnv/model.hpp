#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bnnv {

/// Bipolar value, always -1 or +1.
using Bipolar = std::int8_t;
/// Boolean value, always 0 or 1. +1 maps to 1, -1 maps to 0.
using Bit = std::uint8_t;

constexpr Bit to_bit(Bipolar v) noexcept { return v > 0 ? 1 : 0; }
constexpr Bipolar to_bipolar(Bit b) noexcept { return b ? 1 : -1; }

/// One fully connected layer. Row i holds the weight vector of neuron i,
/// bias weight first, so every row has inputs()+1 entries.
class Layer {
public:
  Layer(int inputs, int neurons);
  Layer(int inputs, int neurons, std::vector<Bipolar> row_major);

  int inputs() const noexcept { return inputs_; }
  int neurons() const noexcept { return neurons_; }
  /// Fan-in including the bias node.
  int fan_in() const noexcept { return inputs_ + 1; }

  Bipolar weight(int neuron, int column) const {
    return weights_[static_cast<std::size_t>(neuron) * fan_in() + column];
  }
  void set_weight(int neuron, int column, Bipolar w);
  std::span<const Bipolar> row(int neuron) const {
    return {weights_.data() + static_cast<std::size_t>(neuron) * fan_in(),
            static_cast<std::size_t>(fan_in())};
  }

  bool operator==(const Layer &) const = default;

private:
  int inputs_;
  int neurons_;
  std::vector<Bipolar> weights_;
};

/// Layered binarized network. dims()[0] is the input width, dims()[L] the
/// number of outputs; bias nodes are implicit.
class BnnModel {
public:
  explicit BnnModel(std::vector<Layer> layers);

  int layer_count() const noexcept { return static_cast<int>(layers_.size()); }
  const Layer &layer(int l) const { return layers_.at(static_cast<std::size_t>(l - 1)); }
  const std::vector<Layer> &layers() const noexcept { return layers_; }
  std::vector<int> dims() const;
  int input_width() const noexcept { return layers_.front().inputs(); }
  int output_width() const noexcept { return layers_.back().neurons(); }
  /// Fan-in (bias included) of every output neuron; output counts range over
  /// 0..output_fan_in().
  int output_fan_in() const noexcept { return layers_.back().fan_in(); }

  bool operator==(const BnnModel &) const = default;

private:
  std::vector<Layer> layers_;
};

struct BipolarEvaluation {
  /// hidden[l-1][i] = x^(l)_i for hidden layers l = 1..L-1.
  std::vector<std::vector<Bipolar>> hidden;
  /// Weighted sums of every layer, hidden and output.
  std::vector<std::vector<int>> sums;
  /// Raw weighted sums of the output layer.
  std::vector<int> outputs;
};

struct BooleanEvaluation {
  std::vector<std::vector<Bit>> hidden;
  /// Number of agreeing weights (count1 of the XNOR vector) per output neuron.
  std::vector<int> output_counts;
};

BipolarEvaluation eval_bipolar(const BnnModel &model, std::span<const Bipolar> input);
BooleanEvaluation eval_boolean(const BnnModel &model, std::span<const Bit> input);

/// Map a count of agreeing positions to the bipolar weighted sum:
/// 2*count - fan_in, with fan_in counting the bias node.
int convert_domain(int count, int fan_in);

/// Activation threshold of a neuron with the given fan-in (bias included).
constexpr int activation_threshold(int fan_in) noexcept { return (fan_in + 1) / 2; }

BnnModel parse_model(std::string_view text);
std::string serialize_model(const BnnModel &model);
BnnModel load_model(const std::string &path);
void save_model(const BnnModel &model, const std::string &path);

/// Uniformly random weights for the given dims (inputs first).
BnnModel random_model(std::span<const int> dims, std::mt19937_64 &rng);

std::vector<Bipolar> bits_to_bipolar(std::span<const Bit> bits);
std::vector<Bit> bipolar_to_bits(std::span<const Bipolar> values);

} // namespace bnnv
