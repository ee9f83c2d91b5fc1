#include "bnnv/circuit.hpp"
#include "bnnv/cnf.hpp"
#include "bnnv/error.hpp"
#include "bnnv/solver.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <random>

using namespace bnnv;
using bnnv::testing::random_property;

namespace {

std::vector<Bit> bits_of(std::uint64_t v, int n) {
  std::vector<Bit> b(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    b[k] = (v >> k) & 1;
  return b;
}

// Patterns 64*block .. 64*block+63 of an n-bit counter, one word per input.
std::vector<std::uint64_t> counter_words(int n, std::uint64_t block) {
  std::vector<std::uint64_t> w(static_cast<std::size_t>(n), 0);
  for (int lane = 0; lane < 64; ++lane) {
    const std::uint64_t v = block * 64 + lane;
    for (int k = 0; k < n; ++k)
      if ((v >> k) & 1)
        w[k] |= std::uint64_t{1} << lane;
  }
  return w;
}

long lane_value(const std::vector<std::uint64_t> &nets, const CountNet &c, int lane) {
  long v = 0;
  for (std::size_t k = 0; k < c.bits.size(); ++k)
    if ((nets[index_of(c.bits[k])] >> lane) & 1)
      v |= 1L << k;
  return v;
}

struct NeuronFixture {
  Circuit c;
  NeuronModule m;
};

NeuronFixture single_neuron(std::span<const Bipolar> weights, bool output_layer) {
  NeuronFixture f;
  CircuitBuilder b(f.c);
  std::vector<NetId> inputs{kTrue};
  for (std::size_t k = 1; k < weights.size(); ++k)
    inputs.push_back(b.input());
  f.m = build_neuron_module(b, weights, 0, inputs, {}, output_layer);
  return f;
}

TEST(Circuit, WorkedNeuron) {
  const std::vector<Bipolar> w = {-1, 1, -1, -1, 1};
  auto f = single_neuron(w, false);
  const std::vector<Bit> x = {1, 0, 1, 1};
  const auto s = simulate(f.c, x);
  EXPECT_EQ(s.nets[index_of(f.m.bit)], 1);
  EXPECT_EQ(s.value(f.m.count), 3);
}

TEST(Circuit, BiasOnlyNeuronIsConstant) {
  const std::vector<Bipolar> w = {1};
  auto f = single_neuron(w, false);
  EXPECT_EQ(f.m.bit, kTrue);
  const std::vector<Bipolar> w0 = {-1};
  EXPECT_EQ(single_neuron(w0, false).m.bit, kFalse);
}

TEST(Circuit, RandomNeuronsExhaustive) {
  std::mt19937_64 rng(43);
  for (int n = 1; n <= 12; ++n) {
    const std::vector<int> dims = {n, 1};
    const BnnModel model = random_model(dims, rng);
    auto f = single_neuron(model.layer(1).row(0), false);
    auto g = single_neuron(model.layer(1).row(0), true);
    for (std::uint64_t v = 0; v < (1u << n); ++v) {
      const auto x = bits_of(v, n);
      const int count = eval_boolean(model, x).output_counts[0];
      const auto sf = simulate(f.c, x);
      ASSERT_EQ(sf.nets[index_of(f.m.bit)], count >= activation_threshold(n + 1) ? 1 : 0);
      ASSERT_EQ(simulate(g.c, x).value(g.m.count), count);
    }
  }
}

TEST(Circuit, AdderTreePopcountExhaustive) {
  for (int n = 1; n <= 12; ++n) {
    Circuit c;
    CircuitBuilder b(c);
    std::vector<NetId> in;
    for (int k = 0; k < n; ++k)
      in.push_back(b.input());
    const CountNet pc = b.popcount(in);
    ASSERT_EQ(static_cast<int>(pc.bits.size()), std::bit_width(static_cast<unsigned>(n)));
    for (std::uint64_t block = 0; block * 64 < (1u << n); ++block) {
      const auto nets = simulate_words(c, counter_words(n, block));
      for (int lane = 0; lane < 64 && block * 64 + lane < (1u << n); ++lane)
        ASSERT_EQ(lane_value(nets, pc, lane), std::popcount(block * 64 + lane));
    }
    // each full adder and each top-column XOR retires exactly one bit
    const auto st = gate_count(c);
    const std::size_t fa = st.by_kind.count(GateKind::FullAdder) ? st.by_kind.at(GateKind::FullAdder) : 0;
    const std::size_t x = st.by_kind.count(GateKind::Xor) ? st.by_kind.at(GateKind::Xor) : 0;
    EXPECT_EQ(fa + x + pc.bits.size(), static_cast<std::size_t>(n)) << n;
  }
}

TEST(Circuit, ComparatorExhaustive) {
  for (int n = 1; n <= 16; ++n) {
    Circuit c;
    CircuitBuilder b(c);
    std::vector<NetId> in;
    for (int k = 0; k < n; ++k)
      in.push_back(b.input());
    const CountNet pc = b.popcount(in);
    std::vector<NetId> ge;
    for (int t = -1; t <= n + 2; ++t)
      ge.push_back(b.greater_equal(pc, t));
    const NetId half = b.greater_equal(pc, (n + 1) / 2);
    for (int count = 0; count <= n; ++count) {
      const auto s = simulate(c, bits_of((std::uint64_t{1} << count) - 1, n));
      for (int t = -1; t <= n + 2; ++t)
        ASSERT_EQ(s.nets[index_of(ge[t + 1])], count >= t ? 1 : 0) << n << " " << count << " " << t;
      ASSERT_EQ(s.nets[index_of(half)], count >= (n + 1) / 2 ? 1 : 0);
    }
  }
}

TEST(Circuit, CompareRelations) {
  const int n = 7;
  Circuit c;
  CircuitBuilder b(c);
  std::vector<NetId> in;
  for (int k = 0; k < n; ++k)
    in.push_back(b.input());
  const CountNet pc = b.popcount(in);
  const Relation rels[] = {Relation::Ge, Relation::Le, Relation::Eq, Relation::Gt, Relation::Lt};
  std::vector<NetId> out;
  for (Relation r : rels)
    for (int k = 0; k <= n + 1; ++k)
      out.push_back(b.compare(pc, r, k));
  for (int count = 0; count <= n; ++count) {
    const auto s = simulate(c, bits_of((std::uint64_t{1} << count) - 1, n));
    std::size_t idx = 0;
    for (Relation r : rels)
      for (int k = 0; k <= n + 1; ++k)
        ASSERT_EQ(s.nets[index_of(out[idx++])], eval_relation(count, r, k) ? 1 : 0);
  }
}

TEST(Circuit, MultiOperandSum) {
  std::mt19937_64 rng(47);
  Circuit c;
  CircuitBuilder b(c);
  std::vector<NetId> in;
  for (int k = 0; k < 14; ++k)
    in.push_back(b.input());
  const std::vector<NetId> g1(in.begin(), in.begin() + 5), g2(in.begin() + 5, in.begin() + 8);
  std::vector<CountNet> ops = {b.popcount(g1), b.popcount(g2)};
  for (int k = 8; k < 14; ++k)
    ops.push_back(CountNet{{in[k]}, 1});
  ops.push_back(CountNet{{kTrue}, 1});
  const CountNet total = b.sum(ops);
  EXPECT_EQ(total.max_value, 15);
  for (std::uint64_t block = 0; block < (1u << 14) / 64; ++block) {
    const auto nets = simulate_words(c, counter_words(14, block));
    for (int lane = 0; lane < 64; ++lane)
      ASSERT_EQ(lane_value(nets, total, lane), std::popcount(block * 64 + lane) + 1);
  }
}

TEST(Circuit, AdderFolding) {
  // every mix of constants and variables on a full adder
  const NetId pool[] = {kFalse, kTrue};
  for (int a = 0; a < 5; ++a)
    for (int bb = 0; bb < 5; ++bb)
      for (int cc = 0; cc < 5; ++cc) {
        Circuit c;
        CircuitBuilder b(c);
        NetId v[3] = {b.input(), b.input(), b.input()};
        auto pickn = [&](int i, int slot) { return i < 2 ? pool[i] : v[slot]; };
        const NetId x = pickn(a, 0), y = pickn(bb, 1), z = pickn(cc, 2);
        const auto [s, carry] = b.full_adder(x, y, z);
        for (std::uint64_t in = 0; in < 8; ++in) {
          const auto sim = simulate(c, bits_of(in, 3));
          const int total = sim.nets[index_of(x)] + sim.nets[index_of(y)] + sim.nets[index_of(z)];
          ASSERT_EQ(sim.nets[index_of(s)], total & 1);
          ASSERT_EQ(sim.nets[index_of(carry)], total >> 1);
        }
      }
}

TEST(Circuit, TwoLayerModuleExhaustive) {
  std::mt19937_64 rng(53);
  const std::vector<int> dims = {4, 3, 2};
  for (int trial = 0; trial < 20; ++trial) {
    const BnnModel model = random_model(dims, rng);
    for (auto mode : {FactoringMode::Off, FactoringMode::Heuristic}) {
      Circuit c;
      CircuitBuilder b(c);
      std::vector<NetId> in;
      for (int k = 0; k < 4; ++k)
        in.push_back(b.input());
      const auto mod = build_bnn_module(b, model, factor_model(model, mode), in);
      for (std::uint64_t v = 0; v < 16; ++v) {
        const auto x = bits_of(v, 4);
        const auto ref = eval_boolean(model, x);
        const auto s = simulate(c, x);
        for (int i = 0; i < 3; ++i)
          ASSERT_EQ(s.nets[index_of(mod.hidden[0][i])], ref.hidden[0][i]);
        for (int i = 0; i < 2; ++i)
          ASSERT_EQ(s.value(mod.outputs[i]), ref.output_counts[i]);
      }
    }
  }
}

TEST(Circuit, IdentityLikeLayer) {
  // neuron i: bias +1 and weight +1 on input i, -1 elsewhere; with two
  // inputs the count is 1 + [x_i] + [!x_other] so the threshold 2 is met
  // exactly when x_i = 1 or x_other = 0
  const BnnModel model({Layer(2, 2, {1, 1, -1, 1, -1, 1}), Layer(2, 1)});
  Circuit c;
  CircuitBuilder b(c);
  std::vector<NetId> in = {b.input(), b.input()};
  const auto mod = build_bnn_module(b, model, {}, in);
  for (std::uint64_t v = 0; v < 4; ++v) {
    const auto x = bits_of(v, 2);
    const auto s = simulate(c, x);
    EXPECT_EQ(s.nets[index_of(mod.hidden[0][0])], x[0] || !x[1]);
    EXPECT_EQ(s.nets[index_of(mod.hidden[0][1])], x[1] || !x[0]);
  }
}

TEST(Circuit, FactoredLayersAgreeExhaustively) {
  std::mt19937_64 rng(59);
  std::uniform_int_distribution<int> width(2, 11), neurons(2, 10);
  int nonempty = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<int> dims = {width(rng), neurons(rng)};
    const BnnModel model = random_model(dims, rng);
    const auto fac = factor_model(model, FactoringMode::Heuristic);
    for (const bool fold : {true, false}) {
      const BuildOptions opts{.fold_weights = fold};
      Circuit a, b;
      CircuitBuilder ba(a), bb(b);
      std::vector<NetId> ia, ib;
      for (int k = 0; k < dims[0]; ++k) {
        ia.push_back(ba.input());
        ib.push_back(bb.input());
      }
      const auto ma = build_bnn_module(ba, model, {}, ia, opts);
      const auto mb = build_bnn_module(bb, model, fac, ib, opts);
      for (std::uint64_t block = 0; block * 64 < (1u << dims[0]); ++block) {
        const auto w = counter_words(dims[0], block);
        const auto na = simulate_words(a, w), nb = simulate_words(b, w);
        for (int lane = 0; lane < 64 && block * 64 + lane < (1u << dims[0]); ++lane)
          for (std::size_t i = 0; i < ma.outputs.size(); ++i)
            ASSERT_EQ(lane_value(na, ma.outputs[i], lane), lane_value(nb, mb.outputs[i], lane));
      }
      if (total_saving(fac) == 0)
        continue;
      if (fold) {
        EXPECT_LE(gate_count(b).popcount_gates, gate_count(a).popcount_gates);
      } else {
        ++nonempty;
        EXPECT_LT(gate_count(b).popcount_gates, gate_count(a).popcount_gates);
        EXPECT_LT(gate_count(b).logic_gates, gate_count(a).logic_gates);
      }
    }
  }
  EXPECT_GT(nonempty, 50);
}

TEST(Circuit, UnpackedCounterSharesXnorsOnly) {
  // two neurons agree on inputs 1 and 2; shared XNOR bits feed each adder tree
  const Layer layer(2, 2, {1, 1, -1, -1, 1, -1});
  Circuit c;
  CircuitBuilder b(c);
  const std::vector<NetId> in = {kTrue, b.input(), b.input()};
  const auto sc = build_shared_counter(b, layer, Factoring{{0, 1}, {1, 2}}, in, {.fold_weights = false}, false);
  EXPECT_FALSE(sc.packed);
  EXPECT_EQ(sc.bits.size(), 2u);
  EXPECT_EQ(gate_count(c).popcount_gates, 2u);
}

TEST(Circuit, FactoredMidSizeRandomVectors) {
  std::mt19937_64 rng(61);
  const std::vector<int> dims = {40, 50, 50, 50};
  const BnnModel model = random_model(dims, rng);
  const auto fac = factor_model(model, FactoringMode::Heuristic);
  ASSERT_GT(total_saving(fac), 0);
  const Property p = parse_property("out[1] >= 20 && out[2] >= 20");
  const Circuit a = build_miter(model, p, empty_factoring(model));
  const Circuit b = build_miter(model, p, fac);
  EXPECT_LT(gate_count(b).logic_gates, gate_count(a).logic_gates);
  for (int round = 0; round < 160; ++round) {
    std::vector<std::uint64_t> w(40);
    for (auto &x : w)
      x = rng();
    const auto na = simulate_words(a, w), nb = simulate_words(b, w);
    for (int i = 1; i <= 50; ++i) {
      const auto &ca = a.counts().at("out" + std::to_string(i));
      const auto &cb = b.counts().at("out" + std::to_string(i));
      for (int lane = 0; lane < 64; ++lane)
        ASSERT_EQ(lane_value(na, ca, lane), lane_value(nb, cb, lane));
    }
    ASSERT_EQ(na[index_of(a.output())], nb[index_of(b.output())]);
  }
}

TEST(Circuit, FactoredEquivalenceBySat) {
  std::mt19937_64 rng(67);
  const std::vector<int> dims = {14, 10, 8, 3};
  const BnnModel model = random_model(dims, rng);
  const auto fac = factor_model(model, FactoringMode::Heuristic);
  ASSERT_GT(total_saving(fac), 0);
  const Circuit miter = build_equivalence_miter(model, empty_factoring(model), fac);
  const auto r = solve(tseitin_encode(miter), SolverConfig{});
  EXPECT_EQ(r.verdict, Verdict::Unsat);
}

TEST(Circuit, PropertyModuleConstants) {
  const BnnModel model({Layer(3, 1)});
  EXPECT_EQ(build_miter(model, out_ge(1, 0), {}).output(), kTrue);
  EXPECT_EQ(build_miter(model, out_ge(1, 5), {}).output(), kFalse);
  EXPECT_THROW(build_miter(model, out_ge(1, 6), {}), ShapeError);
  EXPECT_THROW(build_miter(model, out_ge(2, 1), {}), ShapeError);
}

TEST(Circuit, PropertyModuleMatchesReference) {
  std::mt19937_64 rng(71);
  const std::vector<int> dims = {10, 8, 4};
  for (int trial = 0; trial < 50; ++trial) {
    const BnnModel model = random_model(dims, rng);
    const Property p = random_property(rng, 3, 10, 4, model.output_fan_in());
    const Circuit c = build_miter(model, p, {});
    for (int k = 0; k < 20; ++k) {
      const auto x = bits_of(rng(), 10);
      const bool ref = eval_property(p, x, eval_boolean(model, x).output_counts);
      ASSERT_EQ(simulate(c, x).output, ref) << print_property(p);
    }
  }
}

TEST(Circuit, ScaledThresholdProperty) {
  std::mt19937_64 rng(73);
  const std::vector<int> dims = {100, 30, 30, 30};
  const BnnModel model = random_model(dims, rng);
  const Property p = parse_property("out[1] >= 18 && out[2] >= 18");
  const Circuit c = build_miter(model, p, factor_model(model, FactoringMode::Heuristic));
  int hits = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<Bit> x(100);
    for (auto &b : x)
      b = rng() & 1;
    const bool ref = eval_property(p, x, eval_boolean(model, x).output_counts);
    ASSERT_EQ(simulate(c, x).output, ref);
    hits += ref;
  }
  EXPECT_GT(hits, 0);
}

TEST(Circuit, MiterWitnessFromEnumeration) {
  std::mt19937_64 rng(79);
  const std::vector<int> dims = {8, 5, 3};
  const BnnModel model = random_model(dims, rng);
  const Property p = parse_property("out[1] >= 4 && out[3] <= 3");
  const Circuit c = build_miter(model, p, {});
  int found = 0;
  for (std::uint64_t v = 0; v < 256; ++v) {
    const auto x = bits_of(v, 8);
    const bool ref = eval_property(p, x, eval_boolean(model, x).output_counts);
    ASSERT_EQ(simulate(c, x).output, ref);
    found += ref;
  }
  EXPECT_GT(found, 0);
}

TEST(Circuit, Errors) {
  const BnnModel model({Layer(3, 1)});
  Circuit c = build_miter(model, out_ge(1, 2), {});
  const std::vector<Bit> two = {1, 0};
  EXPECT_THROW(simulate(c, two), ShapeError);
  Circuit empty;
  EXPECT_THROW(empty.output(), ShapeError);
  EXPECT_THROW(empty.add_gate(GateKind::And, std::array{kTrue, NetId{99}}), ShapeError);

  // shared counter on a neuron that does not subscribe
  CircuitBuilder b(empty);
  std::vector<NetId> in = {kTrue, b.input(), b.input(), b.input()};
  const Layer layer(3, 3, {1, 1, 1, 1, 1, 1, 1, 1, -1, -1, -1, -1});
  const auto sc = build_shared_counter(b, layer, Factoring{{0, 1}, {0, 1, 2}}, in, {});
  const SharedCounter *shared[] = {&sc};
  EXPECT_THROW(build_neuron_module(b, layer.row(2), 2, in, shared, false), ShapeError);
  EXPECT_NO_THROW(build_neuron_module(b, layer.row(1), 1, in, shared, false));
  const SharedCounter *twice[] = {&sc, &sc};
  EXPECT_THROW(build_neuron_module(b, layer.row(0), 0, in, twice, false), ShapeError);

  // factoring that does not match the weights
  FactoringSet bad(3, 4);
  bad.add({{0, 2}, {0}});
  EXPECT_THROW(build_miter(BnnModel({layer}), out_ge(1, 2), {bad}), ShapeError);
}

TEST(Circuit, NetlistDump) {
  const BnnModel model({Layer(2, 1, {1, -1, 1})});
  const Circuit c = build_miter(model, out_ge(1, 2), {});
  const std::string d = dump_netlist(c);
  EXPECT_NE(d.find("INPUT"), std::string::npos);
  EXPECT_NE(d.find("output n"), std::string::npos);
}

} // namespace
