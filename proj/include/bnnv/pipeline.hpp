#pragma once

#include "bnnv/circuit.hpp"
#include "bnnv/factoring.hpp"
#include "bnnv/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bnnv {

struct VerifyOptions {
  FactoringMode factoring = FactoringMode::Heuristic;
  BlockSize block;
  SolverConfig solver;
  /// When set, the DIMACS text is written here before solving.
  std::string emit_cnf;
};

struct VerifyReport {
  Verdict verdict = Verdict::Unknown;
  std::string property;
  std::string solver;
  std::string diagnostics;

  FactoringMode factoring_mode = FactoringMode::Off;
  std::size_t factorings = 0;
  long saving = 0;
  GateStats gates;
  int cnf_variables = 0;
  std::size_t cnf_clauses = 0;

  double factor_seconds = 0;
  double build_seconds = 0;
  double encode_seconds = 0;
  double solve_seconds = 0;

  /// Set on RISK: the decoded input and its replay through the reference
  /// evaluator.
  std::optional<std::vector<Bipolar>> counterexample;
  std::vector<int> output_counts;
  std::vector<int> output_sums;
};

/// Factor, build the miter, encode, solve and replay. A SAT witness that
/// does not satisfy the property under eval_boolean raises Error.
VerifyReport verify(const BnnModel &model, const Property &property, const VerifyOptions &opts);

/// Miter CNF only (the encode half of verify).
struct Encoding {
  CnfFormula cnf;
  GateStats gates;
  ModelFactoring factoring;
};
Encoding encode(const BnnModel &model, const Property &property, FactoringMode mode, BlockSize block = {});

struct BruteForceResult {
  bool risk = false;
  std::optional<std::vector<Bipolar>> witness;
  std::uint64_t checked = 0;
};

/// Enumerates every input with eval_boolean and eval_property; stops at the
/// first witness. Refuses models with more than max_bits inputs.
BruteForceResult brute_force_verify(const BnnModel &model, const Property &property, int max_bits = 20);

int exit_code(Verdict v) noexcept;
std::string_view verdict_label(Verdict v) noexcept;

std::string format_text(const VerifyReport &r);
std::string format_json(const VerifyReport &r);

} // namespace bnnv
