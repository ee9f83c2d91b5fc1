// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include "bnnv/circuit.hpp"
#include "bnnv/cnf.hpp"
#include "bnnv/factoring.hpp"
#include "bnnv/pipeline.hpp"
#include "bnnv/reductions.hpp"

#include <fmt/format.h>

#include <bit>
#include <chrono>
#include <exception>
#include <functional>
#include <random>

using namespace bnnv;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

std::vector<Bit> bits_of(std::uint64_t v, int n) {
  std::vector<Bit> b(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    b[k] = (v >> k) & 1;
  return b;
}

Outcome worked_neuron() {
  const auto start = Clock::now();
  const BnnModel model({Layer(4, 1, {-1, 1, -1, -1, 1})});
  const std::vector<Bipolar> x = {1, -1, 1, 1};
  const int im = eval_bipolar(model, x).outputs[0];
  const int sign = im >= 0 ? 1 : -1;
  const int count = eval_boolean(model, bipolar_to_bits(x)).output_counts[0];

  Circuit c;
  CircuitBuilder b(c);
  std::vector<NetId> in = {kTrue};
  for (int k = 0; k < 4; ++k)
    in.push_back(b.input());
  const auto m = build_neuron_module(b, model.layer(1).row(0), 0, in, {}, false);
  const auto sim = simulate(c, bipolar_to_bits(x));
  const int circuit_count = static_cast<int>(sim.value(m.count));
  const int bit = sim.nets[index_of(m.bit)];
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();

  const bool ok = im == 1 && sign == 1 && count == 3 && circuit_count == 3 && bit == 1 && secs < 1.0;
  return {ok, fmt::format("im={} output={:+d} count={} circuit count={} bit={} in {:.4f}s", im, sign, count,
                          circuit_count, bit, secs)};
}

Outcome domain_identity() {
  std::uint64_t checked = 0, bad = 0;
  for (int n = 1; n <= 12; ++n)
    for (std::uint32_t w = 0; w < (1u << n); ++w)
      for (std::uint32_t x = 0; x < (1u << n); ++x) {
        int sum = 0;
        for (int k = 0; k < n; ++k)
          sum += ((w >> k) & 1) == ((x >> k) & 1) ? 1 : -1;
        const int count = n - std::popcount(w ^ x);
        bad += convert_domain(count, n) != sum;
        ++checked;
      }
  return {bad == 0, fmt::format("{} (w, x) pairs for n = 1..12, {} mismatches", checked, bad)};
}

Property random_threshold_property(std::mt19937_64 &rng, const BnnModel &model) {
  std::uniform_int_distribution<int> atoms(1, 2), out(1, model.output_width());
  std::uniform_int_distribution<int> c(0, model.output_fan_in() + 1), rel(0, 4);
  std::vector<Property> parts;
  const int k = atoms(rng);
  for (int i = 0; i < k; ++i)
    parts.push_back(OutputAtom{out(rng), static_cast<Relation>(rel(rng)), c(rng)});
  return Property::all_of(parts);
}

Outcome pipeline_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> inputs(2, 16), hidden(1, 8), outputs(1, 4);
  int agree = 0, sat = 0, replayed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<int> dims = {inputs(rng), hidden(rng), hidden(rng), outputs(rng)};
    const BnnModel model = random_model(dims, rng);
    const Property p = random_threshold_property(rng, model);
    const auto bf = brute_force_verify(model, p, 16);
    VerifyOptions opts;
    opts.factoring = trial % 2 ? FactoringMode::Heuristic : FactoringMode::Off;
    const auto r = verify(model, p, opts);
    agree += r.verdict == (bf.risk ? Verdict::Sat : Verdict::Unsat);
    if (r.verdict == Verdict::Sat) {
      ++sat;
      const auto bits = bipolar_to_bits(*r.counterexample);
      replayed += eval_property(p, bits, eval_boolean(model, bits).output_counts);
    }
  }
  return {agree == 100 && replayed == sat,
          fmt::format("{}/100 verdicts match enumeration ({} SAT), {}/{} witnesses replay", agree, sat, replayed, sat)};
}

long lane_value(const std::vector<std::uint64_t> &nets, const CountNet &c, int lane) {
  long v = 0;
  for (std::size_t k = 0; k < c.bits.size(); ++k)
    if ((nets[index_of(c.bits[k])] >> lane) & 1)
      v |= 1L << k;
  return v;
}

// Gate counts are taken on the netlist with one XNOR gate per weight; with
// weights folded into wires and inverters there is no XNOR left to share.
Outcome factoring_soundness() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> fan(2, 11), neurons(2, 16);
  const BuildOptions unfolded{.fold_weights = false};
  int layers_ok = 0, nonempty = 0, fewer = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<int> dims = {fan(rng), neurons(rng)};
    const BnnModel model = random_model(dims, rng);
    const auto fac = factor_model(model, FactoringMode::Heuristic);
    bool same = true;
    std::size_t gates[2] = {0, 0};
    for (const BuildOptions opts : {BuildOptions{}, unfolded}) {
      Circuit plain, shared;
      CircuitBuilder bp(plain), bs(shared);
      std::vector<NetId> ip, is;
      for (int k = 0; k < dims[0]; ++k) {
        ip.push_back(bp.input());
        is.push_back(bs.input());
      }
      const auto mp = build_bnn_module(bp, model, {}, ip, opts);
      const auto ms = build_bnn_module(bs, model, fac, is, opts);
      for (std::uint64_t v = 0; v < (1u << dims[0]) && same; ++v) {
        const auto x = bits_of(v, dims[0]);
        const auto sp = simulate(plain, x), ss = simulate(shared, x);
        for (std::size_t i = 0; i < mp.outputs.size(); ++i)
          same &= sp.value(mp.outputs[i]) == ss.value(ms.outputs[i]);
      }
      gates[0] = gate_count(plain).logic_gates;
      gates[1] = gate_count(shared).logic_gates;
    }
    layers_ok += same;
    if (!fac.front().empty()) {
      ++nonempty;
      fewer += gates[1] < gates[0];
    }
  }

  const std::vector<int> dims = {64, 50, 50, 50};
  const BnnModel model = random_model(dims, rng);
  const auto fac = factor_model(model, FactoringMode::Heuristic);
  const Property p = parse_property("out[1] >= 25");
  const Circuit a = build_miter(model, p, empty_factoring(model));
  const Circuit b = build_miter(model, p, fac);
  std::uint64_t vectors = 0, mismatches = 0;
  for (int round = 0; round < 160; ++round) {
    std::vector<std::uint64_t> w(64);
    for (auto &x : w)
      x = rng();
    const auto na = simulate_words(a, w), nb = simulate_words(b, w);
    for (int lane = 0; lane < 64; ++lane) {
      ++vectors;
      bool same = true;
      for (int i = 1; i <= 50; ++i) {
        const auto key = fmt::format("out{}", i);
        same &= lane_value(na, a.counts().at(key), lane) == lane_value(nb, b.counts().at(key), lane);
      }
      mismatches += !same;
    }
  }
  const bool model_nonempty = total_saving(fac) > 0;
  const std::size_t ga = gate_count(build_miter(model, p, empty_factoring(model), unfolded)).logic_gates;
  const std::size_t gb = gate_count(build_miter(model, p, fac, unfolded)).logic_gates;
  const bool model_fewer = !model_nonempty || gb < ga;
  if (model_nonempty) {
    ++nonempty;
    fewer += gb < ga;
  }
  const bool ok = layers_ok == 100 && mismatches == 0 && fewer == nonempty && model_fewer;
  return {ok, fmt::format("{}/100 layers equivalent exhaustively; 3x50 model: {} vectors, {} mismatches, "
                          "gates {} -> {}; fewer gates in {}/{} nonempty factorings",
                          layers_ok, vectors, mismatches, ga, gb, fewer, nonempty)};
}

Outcome heuristic_fixtures() {
  std::mt19937_64 rng(777);
  int valid = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    std::uniform_int_distribution<int> rows(1, 40), cols(1, 60);
    const int r = rows(rng), c = cols(rng);
    WeightMatrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        m.set(i, j, rng() & 1 ? Cell::One : Cell::Zero);
    const auto set = find_factorings(m);
    bool ok = is_valid_factoring_set(m, set);
    for (const auto &f : set.factorings())
      ok &= saving(f) > 0;
    valid += ok;
  }
  const auto fig2 = WeightMatrix::from_rows({"010111", "000000", "101000"});
  const long optimal = brute_force_optimal_factorings(fig2, 2).total_saving;
  const long heuristic = find_factorings(fig2).total_saving();
  const auto fig3 = WeightMatrix::from_rows({"1100", "1000", "0110"});
  const auto f = get_factoring(fig3, 0, 0, CellMask(3, 4));
  const long got = f ? saving(*f) : 0;
  return {valid == trials && optimal == 6 && got == 3,
          fmt::format("{}/{} heuristic sets valid; fixture A optimal 2-factoring saving {} (heuristic {}); "
                      "fixture B get_factoring saving {}",
                      valid, trials, optimal, heuristic, got)};
}

Outcome biclique_equality() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> side(1, 6);
  int equal = 0;
  for (int trial = 0; trial < 50; ++trial) {
    BipartiteGraph g{side(rng), side(rng), {}};
    std::bernoulli_distribution e(0.45);
    for (int a = 0; a < g.left; ++a)
      for (int b = 0; b < g.right; ++b)
        if (e(rng))
          g.edges.emplace_back(a, b);
    if (g.edges.empty()) {
      std::uniform_int_distribution<int> a(0, g.left - 1), b(0, g.right - 1);
      g.edges.emplace_back(a(rng), b(rng));
    }
    const long meb = brute_force_max_edge_biclique(g).edges;
    const long sav = brute_force_optimal_factorings(reduce_meb_to_factoring(g), 1).total_saving;
    equal += meb == sav;
  }
  return {equal == 50, fmt::format("{}/50 graphs: max edge biclique equals optimal 1-factoring saving", equal)};
}

Outcome sat3_round_trip() {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> m(1, 10), n(1, 15);
  int agree = 0, sat = 0, decoded = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_cnf3(m(rng), n(rng), rng);
    const bool oracle = brute_force_cnf3(inst);
    const auto r = sat3_to_bnn(inst);
    const auto v = verify(r.model, r.property, {});
    agree += v.verdict == (oracle ? Verdict::Sat : Verdict::Unsat);
    if (v.verdict == Verdict::Sat) {
      ++sat;
      decoded += eval_cnf3(inst, decode_sat3_witness(r, *v.counterexample));
    }
  }
  return {agree == 100 && decoded == sat,
          fmt::format("{}/100 verdicts match enumeration ({} SAT), {}/{} decoded assignments satisfy the formula",
                      agree, sat, decoded, sat)};
}

Outcome large_encoding() {
  std::mt19937_64 rng(784);
  const std::vector<int> dims = {784, 100, 100, 100};
  const BnnModel model = random_model(dims, rng);
  const Property p = parse_property("out[1] >= 90 && out[2] >= 90");
  const auto start = Clock::now();
  const Encoding plain = encode(model, p, FactoringMode::Off);
  const Encoding shared = encode(model, p, FactoringMode::Partitioned);
  const std::size_t plain_bytes = emit_dimacs(plain.cnf).size();
  const std::size_t shared_bytes = emit_dimacs(shared.cnf).size();
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool ok = shared.cnf.variables < plain.cnf.variables && shared.cnf.clauses.size() < plain.cnf.clauses.size() &&
                  plain_bytes > 0 && shared_bytes > 0;
  return {ok, fmt::format("unfactored {} vars / {} clauses, factored (saving {}) {} vars / {} clauses, {:.1f}s",
                          plain.cnf.variables, plain.cnf.clauses.size(), total_saving(shared.factoring),
                          shared.cnf.variables, shared.cnf.clauses.size(), secs)};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 worked neuron", worked_neuron},
      {"2 domain conversion identity", domain_identity},
      {"3 pipeline vs enumeration", pipeline_oracle},
      {"4 factoring soundness", factoring_soundness},
      {"5 heuristic validity and fixtures", heuristic_fixtures},
      {"6 biclique reduction equality", biclique_equality},
      {"7 3SAT round trip", sat3_round_trip},
      {"8 large model encoding", large_encoding},
  };
  int failed = 0;
  for (const auto &[name, run] : criteria) {
    Outcome o;
    const auto start = Clock::now();
    try {
      o = run();
    } catch (const std::exception &e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    fmt::print("criterion {}: {} ({}) [{:.1f}s]\n", name, o.pass ? "PASS" : "FAIL", o.detail, secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
