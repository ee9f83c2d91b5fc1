#pragma once

#include "bnnv/cnf.hpp"
#include "bnnv/model.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bnnv {

enum class Verdict { Sat, Unsat, Unknown };

std::string_view to_string(Verdict v) noexcept;

struct SolveResult {
  Verdict verdict = Verdict::Unknown;
  /// witness[v] = value of variable v, index 0 unused. Present iff SAT.
  std::optional<std::vector<Bit>> witness;
  double seconds = 0;
  std::string solver;
  std::string diagnostics;
};

using Seconds = std::chrono::duration<double>;

class SatBackend {
public:
  virtual ~SatBackend() = default;
  virtual std::string name() const = 0;
  /// Raw solver answer; no witness check. Returns UNKNOWN on timeout.
  virtual SolveResult run(const CnfFormula &cnf, Seconds timeout) = 0;
};

/// In-process PicoSAT.
class PicosatBackend : public SatBackend {
public:
  std::string name() const override { return "picosat"; }
  SolveResult run(const CnfFormula &cnf, Seconds timeout) override;
};

/// External solver: the command (whitespace-separated words, PATH lookup)
/// gets the DIMACS file path appended as its last argument, and must answer
/// in SAT-competition format (`s SATISFIABLE` plus `v` lines, or
/// `s UNSATISFIABLE`). Exit codes 10/20 are accepted when no `s` line is
/// printed. The process is killed at the deadline.
class ProcessBackend : public SatBackend {
public:
  explicit ProcessBackend(std::string command);
  std::string name() const override { return command_; }
  SolveResult run(const CnfFormula &cnf, Seconds timeout) override;

private:
  std::string command_;
};

/// Parses SAT-competition solver output. Throws BackendError when neither
/// the output nor the exit code carries a verdict.
SolveResult parse_solver_output(std::string_view out, int exit_code, int variables);

struct SolverConfig {
  /// Empty selects the built-in PicoSAT backend.
  std::string command;
  Seconds timeout{300};
};

std::unique_ptr<SatBackend> make_backend(const SolverConfig &config);

/// Runs the backend and checks any SAT witness against every clause; a
/// failing witness raises BackendError.
SolveResult solve(const CnfFormula &cnf, SatBackend &backend, Seconds timeout);
SolveResult solve(const CnfFormula &cnf, const SolverConfig &config);

/// Primary-input values of a SAT witness as a bipolar vector (1 -> +1,
/// 0 -> -1). Throws Error on a non-SAT result or a missing witness.
std::vector<Bipolar> decode_counterexample(const SolveResult &result, const CnfFormula &cnf, int input_width);

} // namespace bnnv
