#include "bnnv/pipeline.hpp"

#include "bnnv/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <fstream>

namespace bnnv {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string join(const std::vector<int> &xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k)
    s += fmt::format("{}{}", k ? " " : "", xs[k]);
  return s;
}

} // namespace

Encoding encode(const BnnModel &model, const Property &property, FactoringMode mode, BlockSize block) {
  Encoding e;
  e.factoring = factor_model(model, mode, block);
  const Circuit c = build_miter(model, property, e.factoring);
  e.gates = gate_count(c);
  e.cnf = tseitin_encode(c);
  return e;
}

VerifyReport verify(const BnnModel &model, const Property &property, const VerifyOptions &opts) {
  validate_property(property, model);
  VerifyReport r;
  r.property = print_property(property);
  r.factoring_mode = opts.factoring;

  auto t = Clock::now();
  const ModelFactoring factoring = factor_model(model, opts.factoring, opts.block);
  r.factor_seconds = since(t);
  for (const auto &set : factoring)
    r.factorings += set.factorings().size();
  r.saving = total_saving(factoring);

  t = Clock::now();
  const Circuit c = build_miter(model, property, factoring);
  r.gates = gate_count(c);
  r.build_seconds = since(t);

  t = Clock::now();
  const CnfFormula cnf = tseitin_encode(c);
  r.cnf_variables = cnf.variables;
  r.cnf_clauses = cnf.clauses.size();
  if (!opts.emit_cnf.empty()) {
    std::ofstream out(opts.emit_cnf);
    out << emit_dimacs(cnf);
    if (!out)
      throw Error(fmt::format("cannot write '{}'", opts.emit_cnf));
  }
  r.encode_seconds = since(t);

  const SolveResult s = solve(cnf, opts.solver);
  r.verdict = s.verdict;
  r.solver = s.solver;
  r.diagnostics = s.diagnostics;
  r.solve_seconds = s.seconds;

  if (s.verdict == Verdict::Sat) {
    auto x = decode_counterexample(s, cnf, model.input_width());
    const auto bits = bipolar_to_bits(x);
    const auto eval = eval_boolean(model, bits);
    if (!eval_property(property, bits, eval.output_counts))
      throw Error("counterexample does not replay through the reference evaluator");
    r.output_counts = eval.output_counts;
    r.output_sums = eval_bipolar(model, x).outputs;
    r.counterexample = std::move(x);
  }
  return r;
}

BruteForceResult brute_force_verify(const BnnModel &model, const Property &property, int max_bits) {
  validate_property(property, model);
  const int n = model.input_width();
  if (n > max_bits || n > 62)
    throw InstanceTooLarge(fmt::format("{} input bits exceed the enumeration guard of {}", n, max_bits));
  BruteForceResult r;
  std::vector<Bit> bits(static_cast<std::size_t>(n));
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    for (int k = 0; k < n; ++k)
      bits[static_cast<std::size_t>(k)] = (v >> k) & 1;
    ++r.checked;
    const auto eval = eval_boolean(model, bits);
    if (eval_property(property, bits, eval.output_counts)) {
      r.risk = true;
      r.witness = bits_to_bipolar(bits);
      break;
    }
  }
  return r;
}

int exit_code(Verdict v) noexcept {
  switch (v) {
  case Verdict::Unsat: return 0;
  case Verdict::Sat: return 1;
  case Verdict::Unknown: return 2;
  }
  return 2;
}

std::string_view verdict_label(Verdict v) noexcept {
  switch (v) {
  case Verdict::Unsat: return "SAFE";
  case Verdict::Sat: return "RISK";
  case Verdict::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string format_text(const VerifyReport &r) {
  std::string s = fmt::format("verdict: {}\n", verdict_label(r.verdict));
  s += fmt::format("property: {}\n", r.property);
  s += fmt::format("factoring: {} ({} factorings, saving {})\n", to_string(r.factoring_mode), r.factorings, r.saving);
  s += fmt::format("gates: {} logic, {} adders, {} xnor+adder\n", r.gates.logic_gates, r.gates.adders,
                   r.gates.popcount_gates);
  s += fmt::format("cnf: {} variables, {} clauses\n", r.cnf_variables, r.cnf_clauses);
  s += fmt::format("solver: {} ({:.3f}s)\n", r.solver, r.solve_seconds);
  if (!r.diagnostics.empty())
    s += fmt::format("diagnostics: {}\n", r.diagnostics);
  s += fmt::format("time: factor {:.3f}s, build {:.3f}s, encode {:.3f}s\n", r.factor_seconds, r.build_seconds,
                   r.encode_seconds);
  if (r.counterexample) {
    std::vector<int> x(r.counterexample->begin(), r.counterexample->end());
    s += fmt::format("counterexample: {}\n", join(x));
    s += fmt::format("output counts: {}\n", join(r.output_counts));
    s += fmt::format("output sums: {}\n", join(r.output_sums));
  }
  return s;
}

std::string format_json(const VerifyReport &r) {
  nlohmann::ordered_json j;
  j["verdict"] = verdict_label(r.verdict);
  j["property"] = r.property;
  j["factoring"] = {{"mode", to_string(r.factoring_mode)}, {"count", r.factorings}, {"saving", r.saving}};
  nlohmann::ordered_json kinds;
  for (const auto &[kind, n] : r.gates.by_kind)
    kinds[std::string(to_string(kind))] = n;
  j["gates"] = {{"logic", r.gates.logic_gates}, {"adders", r.gates.adders},
                {"popcount", r.gates.popcount_gates}, {"by_kind", kinds}};
  j["cnf"] = {{"variables", r.cnf_variables}, {"clauses", r.cnf_clauses}};
  j["solver"] = {{"name", r.solver}, {"diagnostics", r.diagnostics}};
  j["seconds"] = {{"factor", r.factor_seconds},
                  {"build", r.build_seconds},
                  {"encode", r.encode_seconds},
                  {"solve", r.solve_seconds}};
  if (r.counterexample) {
    std::vector<int> x(r.counterexample->begin(), r.counterexample->end());
    j["counterexample"] = {{"input", x}, {"output_counts", r.output_counts}, {"output_sums", r.output_sums}};
  }
  return j.dump(2) + "\n";
}

} // namespace bnnv
