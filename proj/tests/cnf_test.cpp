#include "bnnv/cnf.hpp"
#include "bnnv/error.hpp"
#include "bnnv/solver.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace bnnv;
using bnnv::testing::random_property;

namespace {

std::vector<Bit> bits_of(std::uint64_t v, int n) {
  std::vector<Bit> b(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    b[k] = (v >> k) & 1;
  return b;
}

// All models of a small formula, by enumeration.
std::vector<std::vector<Bit>> all_models(const CnfFormula &f) {
  std::vector<std::vector<Bit>> out;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << f.variables); ++v) {
    std::vector<Bit> a(static_cast<std::size_t>(f.variables) + 1, 0);
    for (int k = 0; k < f.variables; ++k)
      a[k + 1] = (v >> k) & 1;
    if (satisfies(f, a))
      out.push_back(a);
  }
  return out;
}

Circuit random_circuit(std::mt19937_64 &rng, int inputs, int gates) {
  Circuit c;
  std::vector<NetId> nets = {kFalse, kTrue};
  for (int k = 0; k < inputs; ++k)
    nets.push_back(c.add_input());
  std::uniform_int_distribution<int> kind(0, 6);
  for (int g = 0; g < gates; ++g) {
    std::uniform_int_distribution<std::size_t> pick(2, nets.size() - 1);
    const NetId a = nets[pick(rng)], b = nets[pick(rng)], d = nets[pick(rng)];
    switch (kind(rng)) {
    case 0: nets.push_back(c.add_gate(GateKind::Not, std::array{a})); break;
    case 1: nets.push_back(c.add_gate(GateKind::And, std::array{a, b})); break;
    case 2: nets.push_back(c.add_gate(GateKind::Or, std::array{a, b})); break;
    case 3: nets.push_back(c.add_gate(GateKind::Xor, std::array{a, b})); break;
    case 4: nets.push_back(c.add_gate(GateKind::Xnor, std::array{a, b})); break;
    case 5: {
      auto [s, cy] = c.add_adder(GateKind::HalfAdder, std::array{a, b});
      nets.push_back(s);
      nets.push_back(cy);
      break;
    }
    default: {
      auto [s, cy] = c.add_adder(GateKind::FullAdder, std::array{a, b, d});
      nets.push_back(s);
      nets.push_back(cy);
      break;
    }
    }
  }
  // AND of a few late nets keeps satisfiability non-trivial
  NetId out = nets.back();
  for (int k = 0; k < 3; ++k) {
    std::uniform_int_distribution<std::size_t> late(nets.size() / 2, nets.size() - 1);
    out = c.add_gate(GateKind::And, std::array{out, nets[late(rng)]});
  }
  c.set_output(out);
  return c;
}

TEST(Cnf, SingleAndGate) {
  Circuit c;
  const NetId a = c.add_input(), b = c.add_input();
  c.set_output(c.add_gate(GateKind::And, std::array{a, b}));
  const CnfFormula f = tseitin_encode(c);
  EXPECT_EQ(f.input_vars, (std::vector<int>{1, 2}));
  const auto models = all_models(f);
  ASSERT_EQ(models.size(), 1u);
  EXPECT_EQ(models[0][1], 1);
  EXPECT_EQ(models[0][2], 1);
}

TEST(Cnf, GateClauseCounts) {
  for (auto [kind, expected] : {std::pair{GateKind::And, 3u}, {GateKind::Or, 3u}, {GateKind::Xor, 4u},
                                {GateKind::Xnor, 4u}, {GateKind::Not, 2u}}) {
    Circuit c;
    const NetId a = c.add_input(), b = c.add_input();
    if (kind == GateKind::Not)
      c.set_output(c.add_gate(kind, std::array{a}));
    else
      c.set_output(c.add_gate(kind, std::array{a, b}));
    EXPECT_EQ(tseitin_encode(c).clauses.size(), expected + 1) << to_string(kind);
  }
}

TEST(Cnf, ConeOfInfluence) {
  Circuit c;
  const NetId a = c.add_input(), b = c.add_input();
  c.add_gate(GateKind::Xor, std::array{a, b});
  c.set_output(c.add_gate(GateKind::Not, std::array{a}));
  const CnfFormula f = tseitin_encode(c);
  EXPECT_EQ(f.variables, 3); // two inputs and the NOT
  EXPECT_EQ(f.input_vars.size(), 2u);
}

TEST(Cnf, ConstantOutputs) {
  const BnnModel model({Layer(3, 1)});
  const auto t = tseitin_encode(build_miter(model, out_ge(1, 0), {}));
  EXPECT_EQ(solve(t, SolverConfig{}).verdict, Verdict::Sat);
  const auto f = tseitin_encode(build_miter(model, out_ge(1, 5), {}));
  EXPECT_EQ(solve(f, SolverConfig{}).verdict, Verdict::Unsat);
}

TEST(Cnf, WorkedNeuronOutputZero) {
  const BnnModel model({Layer(4, 1, {-1, 1, -1, -1, 1})});
  // a hidden-style activation bit asserted to be 0
  Circuit c;
  CircuitBuilder b(c);
  std::vector<NetId> in = {kTrue};
  for (int k = 0; k < 4; ++k)
    in.push_back(b.input());
  const auto m = build_neuron_module(b, model.layer(1).row(0), 0, in, {}, false);
  c.set_output(b.make_not(m.bit));
  CnfFormula f = tseitin_encode(c);

  bool oracle = false;
  for (std::uint64_t v = 0; v < 16; ++v)
    oracle |= eval_boolean(model, bits_of(v, 4)).output_counts[0] < activation_threshold(5);
  EXPECT_TRUE(oracle);
  EXPECT_EQ(solve(f, SolverConfig{}).verdict, Verdict::Sat);

  const std::vector<Bit> fixed = {1, 0, 1, 1};
  for (int k = 0; k < 4; ++k)
    f.add_clause({fixed[k] ? f.input_vars[k] : -f.input_vars[k]});
  EXPECT_EQ(solve(f, SolverConfig{}).verdict, Verdict::Unsat);
}

TEST(Cnf, RandomCircuitsMatchEnumeration) {
  std::mt19937_64 rng(83);
  int sat = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 13;
    const Circuit c = random_circuit(rng, n, 10 + trial);
    bool oracle = false;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n) && !oracle; ++v)
      oracle = simulate(c, bits_of(v, n)).output;
    const CnfFormula f = tseitin_encode(c);
    const auto r = solve(f, SolverConfig{});
    ASSERT_EQ(r.verdict, oracle ? Verdict::Sat : Verdict::Unsat) << trial;
    if (oracle) {
      ++sat;
      std::vector<Bit> x;
      for (int v : f.input_vars)
        x.push_back((*r.witness)[v]);
      ASSERT_TRUE(simulate(c, x).output);
    }
  }
  EXPECT_GT(sat, 5);
  EXPECT_LT(sat, 45);
}

TEST(Cnf, WitnessMatchesSimulationOnAllVariables) {
  std::mt19937_64 rng(89);
  const std::vector<int> dims = {12, 8, 4};
  int solved = 0;
  for (int trial = 0; solved < 20 && trial < 200; ++trial) {
    const BnnModel model = random_model(dims, rng);
    const Property p = random_property(rng, 2, 12, 4, model.output_fan_in());
    const Circuit c = build_miter(model, p, factor_model(model, FactoringMode::Heuristic));
    const CnfFormula f = tseitin_encode(c);
    const auto r = solve(f, SolverConfig{});
    if (r.verdict != Verdict::Sat)
      continue;
    ++solved;
    std::vector<Bit> x;
    for (int v : f.input_vars)
      x.push_back((*r.witness)[v]);
    const auto s = simulate(c, x);
    for (std::size_t net = 0; net < f.varmap.size(); ++net)
      if (f.varmap[net])
        ASSERT_EQ((*r.witness)[f.varmap[net]], s.nets[net]) << net;
  }
  EXPECT_EQ(solved, 20);
}

TEST(Cnf, RandomMitersMatchEnumeration) {
  std::mt19937_64 rng(97);
  int sat = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<int> dims = {3 + trial % 8, 4, 3};
    const BnnModel model = random_model(dims, rng);
    const Property p = random_property(rng, 2, dims[0], 3, model.output_fan_in());
    const int n = dims[0];
    bool oracle = false;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n) && !oracle; ++v) {
      const auto x = bits_of(v, n);
      oracle = eval_property(p, x, eval_boolean(model, x).output_counts);
    }
    const auto r = solve(tseitin_encode(build_miter(model, p, {})), SolverConfig{});
    ASSERT_EQ(r.verdict, oracle ? Verdict::Sat : Verdict::Unsat) << print_property(p);
    sat += oracle;
  }
  EXPECT_GT(sat, 10);
  EXPECT_LT(sat, 90);
}

// --- DIMACS -----------------------------------------------------------------------

// Independent reader: whitespace tokens after the header, split at zeros.
std::vector<std::vector<int>> read_clauses(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == 'p')
      continue;
    std::istringstream ls(line);
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(lit);
      }
    }
  }
  return out;
}

TEST(Dimacs, EmptyFormula) { EXPECT_EQ(emit_dimacs(CnfFormula{}), "p cnf 0 0\n"); }

TEST(Dimacs, UnitClause) {
  CnfFormula f;
  f.variables = 1;
  f.add_clause({1});
  EXPECT_EQ(emit_dimacs(f), "p cnf 1 1\n1 0\n");
}

TEST(Dimacs, RoundTrip) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const Circuit c = random_circuit(rng, 6, 30);
    const CnfFormula f = tseitin_encode(c);
    const std::string text = emit_dimacs(f);
    auto a = read_clauses(text);
    auto b = f.clauses;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    ASSERT_EQ(a, b);
    const CnfFormula g = parse_dimacs(text);
    EXPECT_EQ(g.variables, f.variables);
    EXPECT_EQ(g.clauses, f.clauses);
    EXPECT_EQ(g.input_vars, f.input_vars);
  }
}

TEST(Dimacs, ParserAcceptsLooseLayout) {
  const auto f = parse_dimacs("c hello\np cnf 3 2\n1 -2\n 3 0 -1\n0\n");
  ASSERT_EQ(f.clauses.size(), 2u);
  EXPECT_EQ(f.clauses[0], (Clause{1, -2, 3}));
  EXPECT_EQ(f.clauses[1], (Clause{-1}));
}

TEST(Dimacs, ParserErrors) {
  EXPECT_THROW(parse_dimacs("1 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 1 1\n2 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 1 2\n1 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 1 1\n1\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 1 1\nx 0\n"), ParseError);
}

TEST(Dimacs, ClauseNormalization) {
  CnfFormula f;
  f.variables = 2;
  f.add_clause({1, -1, 2});
  f.add_clause({2, 1, 2});
  ASSERT_EQ(f.clauses.size(), 1u);
  EXPECT_EQ(f.clauses[0], (Clause{1, 2}));
  EXPECT_THROW(f.add_clause({0}), ShapeError);
  EXPECT_THROW(f.add_clause({3}), ShapeError);
}

// --- solving ------------------------------------------------------------------------

TEST(Solve, TrivialUnsat) {
  CnfFormula f;
  f.variables = 1;
  f.add_clause({1});
  f.add_clause({-1});
  const auto r = solve(f, SolverConfig{});
  EXPECT_EQ(r.verdict, Verdict::Unsat);
  EXPECT_FALSE(r.witness);
}

TEST(Solve, TrivialSat) {
  CnfFormula f;
  f.variables = 1;
  f.add_clause({1});
  const auto r = solve(f, SolverConfig{});
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ((*r.witness)[1], 1);
  EXPECT_EQ(r.solver, "picosat");
}

TEST(Solve, SubprocessBackend) {
  CnfFormula f;
  f.variables = 3;
  f.add_clause({1, 2});
  f.add_clause({-1});
  f.add_clause({-2, 3});
  const auto r = solve(f, SolverConfig{BNNV_PICOSAT, Seconds(30)});
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ((*r.witness)[2], 1);
  EXPECT_EQ((*r.witness)[3], 1);
  f.add_clause({-3});
  EXPECT_EQ(solve(f, SolverConfig{BNNV_PICOSAT, Seconds(30)}).verdict, Verdict::Unsat);
}

TEST(Solve, SubprocessTimeoutIsUnknown) {
  CnfFormula f;
  f.variables = 1;
  f.add_clause({1});
  const auto r = solve(f, SolverConfig{std::string(BNNV_PICOSAT) + " --delay 20", Seconds(0.3)});
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_FALSE(r.witness);
  EXPECT_NE(r.diagnostics.find("timeout"), std::string::npos);
  EXPECT_LT(r.seconds, 5.0);
}

TEST(Solve, InProcessTimeoutIsUnknown) {
  // pigeonhole 11 into 10 is far out of reach in a few milliseconds
  const int holes = 10, pigeons = 11;
  CnfFormula f;
  f.variables = holes * pigeons;
  auto var = [&](int p, int h) { return p * holes + h + 1; };
  for (int p = 0; p < pigeons; ++p) {
    Clause c;
    for (int h = 0; h < holes; ++h)
      c.push_back(var(p, h));
    f.add_clause(c);
  }
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q)
        f.add_clause({-var(p, h), -var(q, h)});
  const auto r = solve(f, SolverConfig{"", Seconds(0.05)});
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_LT(r.seconds, 5.0);
}

TEST(Solve, LaunchFailure) {
  CnfFormula f;
  EXPECT_THROW(solve(f, SolverConfig{"/nonexistent/solver", Seconds(1)}), BackendError);
  EXPECT_THROW(solve(f, SolverConfig{"true", Seconds(1)}), BackendError);
  EXPECT_THROW(solve(f, SolverConfig{"", Seconds(0)}), Error);
}

TEST(Solve, WrongWitnessRejected) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto script = dir / "bnnv_liar.sh";
  {
    std::ofstream out(script);
    out << "#!/bin/sh\necho 's SATISFIABLE'\necho 'v -1 0'\nexit 10\n";
  }
  std::filesystem::permissions(script, std::filesystem::perms::owner_all);
  CnfFormula f;
  f.variables = 1;
  f.add_clause({1});
  EXPECT_THROW(solve(f, SolverConfig{script.string(), Seconds(10)}), BackendError);
  std::filesystem::remove(script);
}

TEST(Solve, OutputParsing) {
  auto r = parse_solver_output("c comment\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 10, 3);
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ(*r.witness, (std::vector<Bit>{0, 1, 0, 1}));
  EXPECT_EQ(parse_solver_output("s UNSATISFIABLE\n", 20, 3).verdict, Verdict::Unsat);
  EXPECT_EQ(parse_solver_output("", 20, 3).verdict, Verdict::Unsat);
  EXPECT_EQ(parse_solver_output("s UNKNOWN\n", 0, 3).verdict, Verdict::Unknown);
  EXPECT_THROW(parse_solver_output("s SATISFIABLE\n", 10, 3), BackendError);
  EXPECT_THROW(parse_solver_output("s MAYBE\n", 0, 3), BackendError);
  EXPECT_THROW(parse_solver_output("s SATISFIABLE\nv 4 0\n", 10, 3), BackendError);
  EXPECT_THROW(parse_solver_output("", 0, 3), BackendError);
}

TEST(Decode, FixedInputs) {
  const BnnModel model({Layer(4, 2)});
  const Property p = parse_property("in[1] == 1 && in[2] == 0 && in[3] == 0 && in[4] == 1");
  const CnfFormula f = tseitin_encode(build_miter(model, p, {}));
  const auto r = solve(f, SolverConfig{});
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ(decode_counterexample(r, f, 4), (std::vector<Bipolar>{1, -1, -1, 1}));
  EXPECT_THROW(decode_counterexample(r, f, 3), ShapeError);
}

TEST(Decode, UnsatHasNoCounterexample) {
  // all weights +1: a count of 5 needs every input at 1
  const BnnModel model({Layer(4, 1)});
  const CnfFormula f = tseitin_encode(build_miter(model, parse_property("out[1] >= 5 && in[1] == 0"), {}));
  const auto r = solve(f, SolverConfig{});
  ASSERT_EQ(r.verdict, Verdict::Unsat);
  EXPECT_THROW(decode_counterexample(r, f, 4), Error);
  SolveResult bare;
  bare.verdict = Verdict::Sat;
  EXPECT_THROW(decode_counterexample(bare, f, 4), Error);
}

} // namespace
