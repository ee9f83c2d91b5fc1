#pragma once

#include "bnnv/factoring.hpp"
#include "bnnv/model.hpp"
#include "bnnv/property.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bnnv {

/// Identifier of a single-bit wire.
enum class NetId : std::uint32_t {};

constexpr std::uint32_t index_of(NetId n) noexcept { return static_cast<std::uint32_t>(n); }

/// Nets 0 and 1 are the constants.
inline constexpr NetId kFalse{0};
inline constexpr NetId kTrue{1};

enum class GateKind : std::uint8_t {
  Const,
  Input,
  Not,
  And,
  Or,
  Xor,
  Xnor,
  HalfAdder, // out = a ^ b, carry = a & b
  FullAdder, // out = a ^ b ^ c, carry = maj(a, b, c)
};

std::string_view to_string(GateKind kind) noexcept;

struct Gate {
  GateKind kind;
  std::uint8_t arity = 0;
  std::array<NetId, 3> operands{};
  NetId out{};
  /// Second output of adders; unused otherwise.
  NetId carry{};
};

/// Unsigned binary number on a bundle of nets, least significant bit first.
/// max_value bounds the encoded value; bits.size() == bit width of max_value.
struct CountNet {
  std::vector<NetId> bits;
  int max_value = 0;
};

/// Combinational netlist. Gates are stored in topological order: every
/// operand is driven by an earlier gate.
class Circuit {
public:
  Circuit();

  std::size_t net_count() const noexcept { return driver_.size(); }
  const std::vector<Gate> &gates() const noexcept { return gates_; }
  const std::vector<NetId> &inputs() const noexcept { return inputs_; }
  /// Gate driving a net (constants and inputs have their own gates).
  const Gate &driver(NetId n) const { return gates_[driver_.at(index_of(n))]; }

  bool has_output() const noexcept { return has_output_; }
  NetId output() const;
  void set_output(NetId n);

  /// Named count bundles, e.g. "out1" for output neuron 1.
  const std::map<std::string, CountNet> &counts() const noexcept { return counts_; }
  void name_count(std::string name, CountNet net) { counts_[std::move(name)] = std::move(net); }

  // Raw gate creation; no folding. Use CircuitBuilder for construction.
  NetId add_input();
  NetId add_gate(GateKind kind, std::span<const NetId> operands);
  /// Returns {sum, carry}.
  std::pair<NetId, NetId> add_adder(GateKind kind, std::span<const NetId> operands);

private:
  NetId new_net(std::uint32_t gate);
  void check_operand(NetId n) const;

  std::vector<Gate> gates_;
  std::vector<std::uint32_t> driver_;
  std::vector<NetId> inputs_;
  NetId output_{};
  bool has_output_ = false;
  std::map<std::string, CountNet> counts_;
};

/// Gate construction with local constant folding (x & 0 = 0, x ^ 1 = !x,
/// adders with constant operands, ...). No other simplification is done.
class CircuitBuilder {
public:
  explicit CircuitBuilder(Circuit &c) : c_(c) {}

  Circuit &circuit() noexcept { return c_; }

  NetId input() { return c_.add_input(); }
  NetId constant(bool v) const noexcept { return v ? kTrue : kFalse; }
  NetId make_not(NetId a);
  NetId make_and(NetId a, NetId b);
  NetId make_or(NetId a, NetId b);
  NetId make_xor(NetId a, NetId b);
  NetId make_xnor(NetId a, NetId b);
  std::pair<NetId, NetId> half_adder(NetId a, NetId b);
  std::pair<NetId, NetId> full_adder(NetId a, NetId b, NetId c);

  NetId make_and(std::span<const NetId> xs);
  NetId make_or(std::span<const NetId> xs);

  /// Sum of weighted operands: each CountNet contributes its value, each
  /// single net contributes 0/1. Carry-save reduction column by column with
  /// full and half adders; result width is bit_width(sum of maxima).
  CountNet sum(std::span<const CountNet> operands);
  CountNet popcount(std::span<const NetId> bits);

  /// value >= threshold as a single bit.
  NetId greater_equal(const CountNet &value, long threshold);
  /// value <rel> constant.
  NetId compare(const CountNet &value, Relation rel, long constant);

private:
  static bool is_const(NetId n) noexcept { return n == kTrue || n == kFalse; }
  Circuit &c_;
};

struct BuildOptions {
  /// Replace XNOR with a constant weight by a wire (weight 1) or NOT
  /// (weight 0).
  bool fold_weights = true;
};

/// Counting unit of one factoring: the XNOR outputs over the shared inputs
/// J, fanned out to every neuron in I. When packed, their popcount is
/// computed once and neurons add the count; otherwise neurons add the
/// shared XNOR bits to their own adder trees.
struct SharedCounter {
  Factoring factoring;
  /// Common weights of the subscribers on factoring.inputs.
  std::vector<Bipolar> weights;
  std::vector<NetId> bits;
  bool packed = true;
  CountNet count;
};

/// Builds the counting unit for a factoring of a layer whose inputs are
/// `inputs` (inputs[0] = bias net).
SharedCounter build_shared_counter(CircuitBuilder &b, const Layer &layer, const Factoring &f,
                                   std::span<const NetId> inputs, const BuildOptions &opts,
                                   bool packed = true);

struct NeuronModule {
  /// Activation bit for hidden neurons.
  NetId bit{};
  /// Raw count (bias included) for output neurons.
  CountNet count;
};

/// XNOR + popcount + threshold for one neuron. `inputs` has fan_in entries
/// with inputs[0] the constant-1 bias net. Shared counters must cover
/// disjoint input columns within the fan-in; their neurons must include
/// `neuron` and agree with `weights` on the shared columns.
NeuronModule build_neuron_module(CircuitBuilder &b, std::span<const Bipolar> weights, int neuron,
                                 std::span<const NetId> inputs, std::span<const SharedCounter *const> shared,
                                 bool output_layer, const BuildOptions &opts = {});

struct BnnModule {
  /// hidden[l-1] = activation bits of hidden layer l.
  std::vector<std::vector<NetId>> hidden;
  std::vector<CountNet> outputs;
  std::size_t shared_counters = 0;
};

/// Wires neuron modules layer by layer on top of `inputs` (one net per
/// model input). `factoring` may be empty (no sharing) or hold one set per
/// layer. Per layer, shared counters are packed or not, whichever gives
/// fewer XNOR and adder gates.
BnnModule build_bnn_module(CircuitBuilder &b, const BnnModel &model, const ModelFactoring &factoring,
                           std::span<const NetId> inputs, const BuildOptions &opts = {});

/// Property-module output bit: 1 iff the property holds.
NetId build_property_module(CircuitBuilder &b, const Property &p, std::span<const NetId> inputs,
                            std::span<const CountNet> outputs);

/// Complete miter: primary inputs, BNN module, property module; the
/// output is the property bit. Output counts are named "out1".."outN".
Circuit build_miter(const BnnModel &model, const Property &property, const ModelFactoring &factoring,
                    const BuildOptions &opts = {});

/// Miter whose output is 1 iff the two factorings of the same model
/// disagree on some hidden bit or output count.
Circuit build_equivalence_miter(const BnnModel &model, const ModelFactoring &a, const ModelFactoring &b);

struct Simulation {
  bool output = false;
  /// Value of every net.
  std::vector<Bit> nets;

  long value(const CountNet &n) const;
};

Simulation simulate(const Circuit &c, std::span<const Bit> inputs);

/// Bit-parallel simulation: 64 input patterns per word. inputs[k] holds the
/// patterns of primary input k; returns one word per net.
std::vector<std::uint64_t> simulate_words(const Circuit &c, std::span<const std::uint64_t> inputs);

struct GateStats {
  std::map<GateKind, std::size_t> by_kind;
  std::size_t logic_gates = 0; // everything except Const and Input
  std::size_t adders = 0;
  std::size_t popcount_gates = 0; // XNOR and adders
};

GateStats gate_count(const Circuit &c);

/// Debug netlist: one "id kind operands -> outputs" line per gate.
std::string dump_netlist(const Circuit &c);

} // namespace bnnv
