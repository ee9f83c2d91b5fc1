#include "bnnv/circuit.hpp"

#include "bnnv/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <deque>

namespace bnnv {

std::string_view to_string(GateKind kind) noexcept {
  switch (kind) {
  case GateKind::Const: return "CONST";
  case GateKind::Input: return "INPUT";
  case GateKind::Not: return "NOT";
  case GateKind::And: return "AND";
  case GateKind::Or: return "OR";
  case GateKind::Xor: return "XOR";
  case GateKind::Xnor: return "XNOR";
  case GateKind::HalfAdder: return "HALF_ADDER";
  case GateKind::FullAdder: return "FULL_ADDER";
  }
  return "?";
}

// --- Circuit ------------------------------------------------------------------

Circuit::Circuit() {
  for (int v = 0; v < 2; ++v) {
    Gate g{GateKind::Const};
    g.out = new_net(static_cast<std::uint32_t>(gates_.size()));
    gates_.push_back(g);
  }
}

NetId Circuit::new_net(std::uint32_t gate) {
  driver_.push_back(gate);
  return NetId{static_cast<std::uint32_t>(driver_.size() - 1)};
}

void Circuit::check_operand(NetId n) const {
  if (index_of(n) >= driver_.size())
    throw ShapeError(fmt::format("net {} used before definition", index_of(n)));
}

NetId Circuit::output() const {
  if (!has_output_)
    throw ShapeError("circuit has no designated output");
  return output_;
}

void Circuit::set_output(NetId n) {
  check_operand(n);
  output_ = n;
  has_output_ = true;
}

NetId Circuit::add_input() {
  Gate g{GateKind::Input};
  g.out = new_net(static_cast<std::uint32_t>(gates_.size()));
  gates_.push_back(g);
  inputs_.push_back(g.out);
  return g.out;
}

NetId Circuit::add_gate(GateKind kind, std::span<const NetId> operands) {
  const std::size_t arity = kind == GateKind::Not ? 1 : 2;
  if (kind == GateKind::Const || kind == GateKind::Input || kind == GateKind::HalfAdder ||
      kind == GateKind::FullAdder)
    throw ShapeError(fmt::format("add_gate cannot create {}", to_string(kind)));
  if (operands.size() != arity)
    throw ShapeError(fmt::format("{} expects {} operands", to_string(kind), arity));
  Gate g{kind, static_cast<std::uint8_t>(arity)};
  for (std::size_t k = 0; k < arity; ++k) {
    check_operand(operands[k]);
    g.operands[k] = operands[k];
  }
  g.out = new_net(static_cast<std::uint32_t>(gates_.size()));
  gates_.push_back(g);
  return g.out;
}

std::pair<NetId, NetId> Circuit::add_adder(GateKind kind, std::span<const NetId> operands) {
  const std::size_t arity = kind == GateKind::HalfAdder ? 2 : kind == GateKind::FullAdder ? 3 : 0;
  if (arity == 0 || operands.size() != arity)
    throw ShapeError("add_adder expects HALF_ADDER with 2 or FULL_ADDER with 3 operands");
  Gate g{kind, static_cast<std::uint8_t>(arity)};
  for (std::size_t k = 0; k < arity; ++k) {
    check_operand(operands[k]);
    g.operands[k] = operands[k];
  }
  const auto id = static_cast<std::uint32_t>(gates_.size());
  g.out = new_net(id);
  g.carry = new_net(id);
  gates_.push_back(g);
  return {g.out, g.carry};
}

// --- CircuitBuilder -------------------------------------------------------------

NetId CircuitBuilder::make_not(NetId a) {
  if (is_const(a))
    return a == kTrue ? kFalse : kTrue;
  return c_.add_gate(GateKind::Not, std::array{a});
}

NetId CircuitBuilder::make_and(NetId a, NetId b) {
  if (a == kFalse || b == kFalse)
    return kFalse;
  if (a == kTrue)
    return b;
  if (b == kTrue)
    return a;
  return c_.add_gate(GateKind::And, std::array{a, b});
}

NetId CircuitBuilder::make_or(NetId a, NetId b) {
  if (a == kTrue || b == kTrue)
    return kTrue;
  if (a == kFalse)
    return b;
  if (b == kFalse)
    return a;
  return c_.add_gate(GateKind::Or, std::array{a, b});
}

NetId CircuitBuilder::make_xor(NetId a, NetId b) {
  if (is_const(a))
    std::swap(a, b);
  if (b == kFalse)
    return a;
  if (b == kTrue)
    return make_not(a);
  return c_.add_gate(GateKind::Xor, std::array{a, b});
}

NetId CircuitBuilder::make_xnor(NetId a, NetId b) {
  if (is_const(a))
    std::swap(a, b);
  if (b == kTrue)
    return a;
  if (b == kFalse)
    return make_not(a);
  return c_.add_gate(GateKind::Xnor, std::array{a, b});
}

NetId CircuitBuilder::make_and(std::span<const NetId> xs) {
  NetId acc = kTrue;
  for (NetId x : xs)
    acc = make_and(acc, x);
  return acc;
}

NetId CircuitBuilder::make_or(std::span<const NetId> xs) {
  NetId acc = kFalse;
  for (NetId x : xs)
    acc = make_or(acc, x);
  return acc;
}

std::pair<NetId, NetId> CircuitBuilder::half_adder(NetId a, NetId b) {
  if (is_const(a))
    std::swap(a, b);
  if (b == kFalse)
    return {a, kFalse};
  if (b == kTrue)
    return {make_not(a), a};
  return c_.add_adder(GateKind::HalfAdder, std::array{a, b});
}

std::pair<NetId, NetId> CircuitBuilder::full_adder(NetId a, NetId b, NetId c) {
  std::vector<NetId> vars;
  int ones = 0;
  for (NetId x : {a, b, c}) {
    if (x == kTrue)
      ++ones;
    else if (x != kFalse)
      vars.push_back(x);
  }
  switch (vars.size()) {
  case 3:
    return c_.add_adder(GateKind::FullAdder, std::array{a, b, c});
  case 2:
    if (ones == 0)
      return half_adder(vars[0], vars[1]);
    return {make_xnor(vars[0], vars[1]), make_or(vars[0], vars[1])};
  case 1:
    if (ones == 0)
      return {vars[0], kFalse};
    if (ones == 1)
      return {make_not(vars[0]), vars[0]};
    return {vars[0], kTrue};
  default:
    return {constant(ones & 1), constant(ones >> 1)};
  }
}

CountNet CircuitBuilder::sum(std::span<const CountNet> operands) {
  long total = 0;
  for (const auto &op : operands)
    total += op.max_value;
  const int width = std::bit_width(static_cast<unsigned long>(total));

  std::vector<std::deque<NetId>> columns(static_cast<std::size_t>(width));
  auto place = [&](std::size_t col, NetId n) {
    if (n != kFalse)
      columns[col].push_back(n);
  };
  for (const auto &op : operands)
    for (std::size_t k = 0; k < op.bits.size(); ++k)
      place(k, op.bits[k]);

  CountNet result{{}, static_cast<int>(total)};
  for (int col = 0; col < width; ++col) {
    auto &q = columns[col];
    if (col == width - 1) {
      // The top column never carries out because the sum is below 2^width,
      // so at most one of its bits is set.
      while (q.size() > 1) {
        NetId a = q.front();
        q.pop_front();
        NetId b = q.front();
        q.pop_front();
        place(col, make_xor(a, b));
      }
    } else {
      while (q.size() >= 3) {
        NetId a = q.front();
        q.pop_front();
        NetId b = q.front();
        q.pop_front();
        NetId c = q.front();
        q.pop_front();
        auto [s, carry] = full_adder(a, b, c);
        place(col, s);
        place(col + 1, carry);
      }
      if (q.size() == 2) {
        NetId a = q.front();
        q.pop_front();
        NetId b = q.front();
        q.pop_front();
        auto [s, carry] = half_adder(a, b);
        place(col, s);
        place(col + 1, carry);
      }
    }
    result.bits.push_back(q.empty() ? kFalse : q.front());
  }
  return result;
}

CountNet CircuitBuilder::popcount(std::span<const NetId> bits) {
  std::vector<CountNet> ops;
  ops.reserve(bits.size());
  for (NetId b : bits)
    ops.push_back(CountNet{{b}, 1});
  return sum(ops);
}

NetId CircuitBuilder::greater_equal(const CountNet &value, long threshold) {
  if (threshold <= 0)
    return kTrue;
  if (threshold > value.max_value)
    return kFalse;
  // Scan from LSB: acc = [value[k..0] >= threshold[k..0]].
  NetId acc = kTrue;
  for (std::size_t k = 0; k < value.bits.size(); ++k) {
    const bool t = (threshold >> k) & 1;
    acc = t ? make_and(value.bits[k], acc) : make_or(value.bits[k], acc);
  }
  return acc;
}

NetId CircuitBuilder::compare(const CountNet &value, Relation rel, long constant) {
  switch (rel) {
  case Relation::Ge: return greater_equal(value, constant);
  case Relation::Gt: return greater_equal(value, constant + 1);
  case Relation::Le: return make_not(greater_equal(value, constant + 1));
  case Relation::Lt: return make_not(greater_equal(value, constant));
  case Relation::Eq:
    return make_and(greater_equal(value, constant), make_not(greater_equal(value, constant + 1)));
  }
  return kFalse;
}

// --- BNN modules ------------------------------------------------------------------

namespace {

NetId xnor_weight(CircuitBuilder &b, NetId input, Bipolar w, const BuildOptions &opts) {
  const NetId wbit = b.constant(w > 0);
  if (opts.fold_weights)
    return b.make_xnor(input, wbit);
  return b.circuit().add_gate(GateKind::Xnor, std::array{input, wbit});
}

} // namespace

SharedCounter build_shared_counter(CircuitBuilder &b, const Layer &layer, const Factoring &f,
                                   std::span<const NetId> inputs, const BuildOptions &opts, bool packed) {
  if (f.neurons.empty())
    throw ShapeError("shared counter needs at least one neuron");
  SharedCounter sc{f, {}, {}, packed, {}};
  for (int j : f.inputs) {
    if (j < 0 || j >= static_cast<int>(inputs.size()))
      throw ShapeError(fmt::format("shared input {} outside the fan-in", j));
    const Bipolar w = layer.weight(f.neurons.front(), j);
    sc.weights.push_back(w);
    sc.bits.push_back(xnor_weight(b, inputs[j], w, opts));
  }
  if (packed)
    sc.count = b.popcount(sc.bits);
  return sc;
}

NeuronModule build_neuron_module(CircuitBuilder &b, std::span<const Bipolar> weights, int neuron,
                                 std::span<const NetId> inputs, std::span<const SharedCounter *const> shared,
                                 bool output_layer, const BuildOptions &opts) {
  const auto fan_in = static_cast<int>(weights.size());
  if (static_cast<int>(inputs.size()) != fan_in)
    throw ShapeError(fmt::format("neuron has {} weights but {} input nets", fan_in, inputs.size()));

  std::vector<char> covered(static_cast<std::size_t>(fan_in), 0);
  std::vector<CountNet> operands;
  for (const SharedCounter *sc : shared) {
    const auto &f = sc->factoring;
    if (std::find(f.neurons.begin(), f.neurons.end(), neuron) == f.neurons.end())
      throw ShapeError(fmt::format("neuron {} does not subscribe to this shared counter", neuron));
    for (std::size_t k = 0; k < f.inputs.size(); ++k) {
      const int j = f.inputs[k];
      if (j < 0 || j >= fan_in)
        throw ShapeError(fmt::format("shared input {} outside fan-in {}", j, fan_in));
      if (covered[j])
        throw ShapeError(fmt::format("shared counters overlap on input {}", j));
      if (weights[j] != sc->weights[k])
        throw ShapeError(fmt::format("neuron {} disagrees with its shared counter on input {}", neuron, j));
      covered[j] = 1;
    }
    if (sc->packed)
      operands.push_back(sc->count);
    else
      for (NetId bit : sc->bits)
        operands.push_back(CountNet{{bit}, 1});
  }
  for (int j = 0; j < fan_in; ++j)
    if (!covered[j])
      operands.push_back(CountNet{{xnor_weight(b, inputs[j], weights[j], opts)}, 1});

  NeuronModule m;
  m.count = b.sum(operands);
  if (!output_layer)
    m.bit = b.greater_equal(m.count, activation_threshold(fan_in));
  return m;
}

namespace {

struct LayerNets {
  std::vector<NetId> bits;
  std::vector<CountNet> counts;
  std::size_t shared_counters = 0;
};

LayerNets build_layer(CircuitBuilder &b, const Layer &layer, const FactoringSet *set, std::span<const NetId> inputs,
                      bool is_output, bool packed, const BuildOptions &opts) {
  std::vector<SharedCounter> counters;
  if (set)
    for (const auto &f : set->factorings())
      counters.push_back(build_shared_counter(b, layer, f, inputs, opts, packed));
  LayerNets out;
  out.shared_counters = counters.size();
  for (int i = 0; i < layer.neurons(); ++i) {
    std::vector<const SharedCounter *> mine;
    for (const auto &sc : counters)
      if (std::binary_search(sc.factoring.neurons.begin(), sc.factoring.neurons.end(), i))
        mine.push_back(&sc);
    auto nm = build_neuron_module(b, layer.row(i), i, inputs, mine, is_output, opts);
    if (is_output)
      out.counts.push_back(std::move(nm.count));
    else
      out.bits.push_back(nm.bit);
  }
  return out;
}

// Gate cost of a layer built in isolation over stand-ins for `inputs`.
GateStats layer_cost(const Layer &layer, const FactoringSet &set, std::span<const NetId> inputs, bool is_output,
                     bool packed, const BuildOptions &opts) {
  Circuit scratch;
  CircuitBuilder b(scratch);
  std::vector<NetId> stand_ins;
  for (NetId n : inputs)
    stand_ins.push_back(n == kTrue || n == kFalse ? n : b.input());
  build_layer(b, layer, &set, stand_ins, is_output, packed, opts);
  return gate_count(scratch);
}

} // namespace

BnnModule build_bnn_module(CircuitBuilder &b, const BnnModel &model, const ModelFactoring &factoring,
                           std::span<const NetId> inputs, const BuildOptions &opts) {
  if (static_cast<int>(inputs.size()) != model.input_width())
    throw ShapeError(fmt::format("{} input nets for a model with {} inputs", inputs.size(), model.input_width()));
  if (!factoring.empty() && static_cast<int>(factoring.size()) != model.layer_count())
    throw ShapeError("factoring must hold one set per layer");

  BnnModule out;
  std::vector<NetId> layer_inputs{kTrue};
  layer_inputs.insert(layer_inputs.end(), inputs.begin(), inputs.end());

  for (int l = 1; l <= model.layer_count(); ++l) {
    const Layer &layer = model.layer(l);
    const bool is_output = l == model.layer_count();
    const FactoringSet *set = nullptr;
    bool packed = true;
    if (!factoring.empty() && !factoring[static_cast<std::size_t>(l - 1)].factorings().empty()) {
      set = &factoring[static_cast<std::size_t>(l - 1)];
      if (!is_valid_factoring_set(WeightMatrix::from_layer(layer), *set))
        throw ShapeError(fmt::format("factoring is not valid for layer {}", l));
      const GateStats p = layer_cost(layer, *set, layer_inputs, is_output, true, opts);
      const GateStats u = layer_cost(layer, *set, layer_inputs, is_output, false, opts);
      packed = std::pair(p.popcount_gates, p.logic_gates) <= std::pair(u.popcount_gates, u.logic_gates);
    }
    LayerNets nets = build_layer(b, layer, set, layer_inputs, is_output, packed, opts);
    out.shared_counters += nets.shared_counters;
    if (is_output) {
      out.outputs = std::move(nets.counts);
    } else {
      out.hidden.push_back(nets.bits);
      layer_inputs.assign(1, kTrue);
      layer_inputs.insert(layer_inputs.end(), nets.bits.begin(), nets.bits.end());
    }
  }
  return out;
}

NetId build_property_module(CircuitBuilder &b, const Property &p, std::span<const NetId> inputs,
                            std::span<const CountNet> outputs) {
  return std::visit(
      [&](const auto &n) -> NetId {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, OutputAtom>) {
          if (n.index < 1 || n.index > static_cast<int>(outputs.size()))
            throw ShapeError(fmt::format("out[{}] outside 1..{}", n.index, outputs.size()));
          const auto &count = outputs[static_cast<std::size_t>(n.index - 1)];
          if (n.constant < 0 || n.constant > count.max_value + 1)
            throw ShapeError(fmt::format("threshold {} outside 0..{}", n.constant, count.max_value + 1));
          return b.compare(count, n.rel, n.constant);
        } else if constexpr (std::is_same_v<T, InputAtom>) {
          if (n.index < 1 || n.index > static_cast<int>(inputs.size()))
            throw ShapeError(fmt::format("in[{}] outside 1..{}", n.index, inputs.size()));
          const NetId x = inputs[static_cast<std::size_t>(n.index - 1)];
          return n.value ? x : b.make_not(x);
        } else if constexpr (std::is_same_v<T, NotNode>) {
          return b.make_not(build_property_module(b, n.operand, inputs, outputs));
        } else {
          const NetId lhs = build_property_module(b, n.lhs, inputs, outputs);
          const NetId rhs = build_property_module(b, n.rhs, inputs, outputs);
          switch (n.op) {
          case Connective::And: return b.make_and(lhs, rhs);
          case Connective::Or: return b.make_or(lhs, rhs);
          case Connective::Implies: return b.make_or(b.make_not(lhs), rhs);
          }
          return kFalse;
        }
      },
      p.node());
}

Circuit build_miter(const BnnModel &model, const Property &property, const ModelFactoring &factoring,
                    const BuildOptions &opts) {
  validate_property(property, model);
  Circuit c;
  CircuitBuilder b(c);
  std::vector<NetId> inputs;
  for (int k = 0; k < model.input_width(); ++k)
    inputs.push_back(b.input());
  auto bnn = build_bnn_module(b, model, factoring, inputs, opts);
  for (std::size_t i = 0; i < bnn.outputs.size(); ++i)
    c.name_count(fmt::format("out{}", i + 1), bnn.outputs[i]);
  c.set_output(build_property_module(b, property, inputs, bnn.outputs));
  return c;
}

Circuit build_equivalence_miter(const BnnModel &model, const ModelFactoring &fa, const ModelFactoring &fb) {
  Circuit c;
  CircuitBuilder b(c);
  std::vector<NetId> inputs;
  for (int k = 0; k < model.input_width(); ++k)
    inputs.push_back(b.input());
  auto ma = build_bnn_module(b, model, fa, inputs);
  auto mb = build_bnn_module(b, model, fb, inputs);
  std::vector<NetId> diffs;
  for (std::size_t l = 0; l < ma.hidden.size(); ++l)
    for (std::size_t i = 0; i < ma.hidden[l].size(); ++i)
      diffs.push_back(b.make_xor(ma.hidden[l][i], mb.hidden[l][i]));
  for (std::size_t i = 0; i < ma.outputs.size(); ++i) {
    const auto &x = ma.outputs[i].bits;
    const auto &y = mb.outputs[i].bits;
    if (x.size() != y.size())
      throw ShapeError("output count widths differ between variants");
    for (std::size_t k = 0; k < x.size(); ++k)
      diffs.push_back(b.make_xor(x[k], y[k]));
  }
  c.set_output(b.make_or(diffs));
  return c;
}

// --- simulation and statistics -------------------------------------------------------

std::vector<std::uint64_t> simulate_words(const Circuit &c, std::span<const std::uint64_t> inputs) {
  if (inputs.size() != c.inputs().size())
    throw ShapeError(fmt::format("circuit has {} inputs, got {}", c.inputs().size(), inputs.size()));
  std::vector<std::uint64_t> v(c.net_count(), 0);
  v[index_of(kTrue)] = ~std::uint64_t{0};
  for (std::size_t k = 0; k < inputs.size(); ++k)
    v[index_of(c.inputs()[k])] = inputs[k];
  for (const Gate &g : c.gates()) {
    auto op = [&](int k) { return v[index_of(g.operands[static_cast<std::size_t>(k)])]; };
    auto &out = v[index_of(g.out)];
    switch (g.kind) {
    case GateKind::Const:
    case GateKind::Input: break;
    case GateKind::Not: out = ~op(0); break;
    case GateKind::And: out = op(0) & op(1); break;
    case GateKind::Or: out = op(0) | op(1); break;
    case GateKind::Xor: out = op(0) ^ op(1); break;
    case GateKind::Xnor: out = ~(op(0) ^ op(1)); break;
    case GateKind::HalfAdder:
      out = op(0) ^ op(1);
      v[index_of(g.carry)] = op(0) & op(1);
      break;
    case GateKind::FullAdder: {
      const auto a = op(0), b = op(1), cin = op(2);
      out = a ^ b ^ cin;
      v[index_of(g.carry)] = (a & b) | (cin & (a ^ b));
      break;
    }
    }
  }
  return v;
}

Simulation simulate(const Circuit &c, std::span<const Bit> inputs) {
  if (inputs.size() != c.inputs().size())
    throw ShapeError(fmt::format("circuit has {} inputs, got {}", c.inputs().size(), inputs.size()));
  std::vector<std::uint64_t> words(inputs.size());
  for (std::size_t k = 0; k < inputs.size(); ++k)
    words[k] = inputs[k] ? 1 : 0;
  const auto v = simulate_words(c, words);
  Simulation s;
  s.nets.resize(v.size());
  for (std::size_t n = 0; n < v.size(); ++n)
    s.nets[n] = static_cast<Bit>(v[n] & 1U);
  s.output = c.has_output() && s.nets[index_of(c.output())];
  return s;
}

long Simulation::value(const CountNet &n) const {
  long v = 0;
  for (std::size_t k = 0; k < n.bits.size(); ++k)
    if (nets.at(index_of(n.bits[k])))
      v |= 1L << k;
  return v;
}

GateStats gate_count(const Circuit &c) {
  GateStats s;
  for (const Gate &g : c.gates()) {
    ++s.by_kind[g.kind];
    if (g.kind != GateKind::Const && g.kind != GateKind::Input)
      ++s.logic_gates;
    if (g.kind == GateKind::HalfAdder || g.kind == GateKind::FullAdder)
      ++s.adders;
  }
  s.popcount_gates = s.adders;
  if (auto it = s.by_kind.find(GateKind::Xnor); it != s.by_kind.end())
    s.popcount_gates += it->second;
  return s;
}

std::string dump_netlist(const Circuit &c) {
  std::string out;
  for (std::size_t id = 0; id < c.gates().size(); ++id) {
    const Gate &g = c.gates()[id];
    out += fmt::format("{} {}", id, to_string(g.kind));
    for (std::size_t k = 0; k < g.arity; ++k)
      out += fmt::format(" n{}", index_of(g.operands[k]));
    out += fmt::format(" -> n{}", index_of(g.out));
    if (g.kind == GateKind::HalfAdder || g.kind == GateKind::FullAdder)
      out += fmt::format(" n{}", index_of(g.carry));
    out += '\n';
  }
  if (c.has_output())
    out += fmt::format("output n{}\n", index_of(c.output()));
  return out;
}

} // namespace bnnv
