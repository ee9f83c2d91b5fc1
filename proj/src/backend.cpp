#include "bnnv/solver.hpp"

#include "bnnv/error.hpp"

#include <fmt/format.h>

extern "C" {
#include "picosat.h"
}

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace bnnv {

using Clock = std::chrono::steady_clock;

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
  case Verdict::Sat: return "SAT";
  case Verdict::Unsat: return "UNSAT";
  case Verdict::Unknown: return "UNKNOWN";
  }
  return "?";
}

// --- PicoSAT ------------------------------------------------------------------

namespace {

struct Deadline {
  Clock::time_point at;
  bool hit = false;
};

int deadline_reached(void *state) {
  auto *d = static_cast<Deadline *>(state);
  if (Clock::now() >= d->at)
    d->hit = true;
  return d->hit ? 1 : 0;
}

} // namespace

SolveResult PicosatBackend::run(const CnfFormula &cnf, Seconds timeout) {
  const auto start = Clock::now();
  Deadline deadline{start + std::chrono::duration_cast<Clock::duration>(timeout)};

  PicoSAT *ps = picosat_init();
  if (!ps)
    throw BackendError("picosat_init failed");
  struct Guard {
    PicoSAT *ps;
    ~Guard() { picosat_reset(ps); }
  } guard{ps};

  picosat_adjust(ps, cnf.variables);
  for (const auto &cl : cnf.clauses) {
    for (int lit : cl)
      picosat_add(ps, lit);
    picosat_add(ps, 0);
  }
  picosat_set_interrupt(ps, &deadline, deadline_reached);
  const int res = picosat_sat(ps, -1);

  SolveResult r;
  r.solver = name();
  if (res == PICOSAT_SATISFIABLE) {
    r.verdict = Verdict::Sat;
    std::vector<Bit> w(static_cast<std::size_t>(cnf.variables) + 1, 0);
    for (int v = 1; v <= cnf.variables; ++v)
      w[static_cast<std::size_t>(v)] = picosat_deref(ps, v) > 0 ? 1 : 0;
    r.witness = std::move(w);
  } else if (res == PICOSAT_UNSATISFIABLE) {
    r.verdict = Verdict::Unsat;
  } else {
    r.verdict = Verdict::Unknown;
    r.diagnostics = deadline.hit ? fmt::format("timeout after {:.3f}s", timeout.count()) : "solver gave up";
  }
  r.seconds = Seconds(Clock::now() - start).count();
  return r;
}

// --- subprocess -----------------------------------------------------------------

ProcessBackend::ProcessBackend(std::string command) : command_(std::move(command)) {
  if (command_.find_first_not_of(" \t") == std::string::npos)
    throw BackendError("empty solver command");
}

SolveResult parse_solver_output(std::string_view out, int exit_code, int variables) {
  SolveResult r;
  std::optional<Verdict> verdict;
  std::vector<Bit> w(static_cast<std::size_t>(variables) + 1, 0);
  bool saw_values = false;

  std::istringstream in{std::string(out)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.rfind("s ", 0) == 0) {
      const auto status = line.substr(2);
      if (status == "SATISFIABLE")
        verdict = Verdict::Sat;
      else if (status == "UNSATISFIABLE")
        verdict = Verdict::Unsat;
      else if (status == "UNKNOWN")
        verdict = Verdict::Unknown;
      else
        throw BackendError(fmt::format("unrecognized status line '{}'", line));
    } else if (line.rfind("v ", 0) == 0 || line == "v") {
      std::istringstream vs(line.substr(1));
      long lit = 0;
      while (vs >> lit) {
        if (lit == 0)
          continue;
        if (std::labs(lit) > variables)
          throw BackendError(fmt::format("value line mentions variable {} > {}", std::labs(lit), variables));
        w[static_cast<std::size_t>(std::labs(lit))] = lit > 0 ? 1 : 0;
        saw_values = true;
      }
    }
  }
  if (!verdict) {
    if (exit_code == 10)
      verdict = Verdict::Sat;
    else if (exit_code == 20)
      verdict = Verdict::Unsat;
    else
      throw BackendError(fmt::format("solver printed no status line (exit code {})", exit_code));
  }
  r.verdict = *verdict;
  if (r.verdict == Verdict::Sat) {
    if (!saw_values && variables > 0)
      throw BackendError("solver reported SAT without value lines");
    r.witness = std::move(w);
  }
  return r;
}

namespace {

std::vector<std::string> split_words(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w)
    out.push_back(w);
  return out;
}

class TempFile {
public:
  explicit TempFile(const std::string &contents) {
    const char *dir = std::getenv("TMPDIR");
    path_ = fmt::format("{}/bnnv-XXXXXX.cnf", dir && *dir ? dir : "/tmp");
    const int fd = mkstemps(path_.data(), 4);
    if (fd < 0)
      throw BackendError(fmt::format("cannot create temporary file: {}", std::strerror(errno)));
    std::size_t done = 0;
    while (done < contents.size()) {
      const ssize_t n = ::write(fd, contents.data() + done, contents.size() - done);
      if (n < 0 && errno == EINTR)
        continue;
      if (n <= 0) {
        ::close(fd);
        ::unlink(path_.c_str());
        throw BackendError("cannot write temporary DIMACS file");
      }
      done += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempFile() { ::unlink(path_.c_str()); }
  TempFile(const TempFile &) = delete;
  TempFile &operator=(const TempFile &) = delete;
  const std::string &path() const { return path_; }

private:
  std::string path_;
};

} // namespace

SolveResult ProcessBackend::run(const CnfFormula &cnf, Seconds timeout) {
  const auto start = Clock::now();
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(timeout);
  TempFile file(emit_dimacs(cnf));

  auto words = split_words(command_);
  words.push_back(file.path());
  std::vector<char *> argv;
  for (auto &w : words)
    argv.push_back(w.data());
  argv.push_back(nullptr);

  int out_pipe[2];
  int err_pipe[2]; // reports exec failure; closed on successful exec
  if (pipe2(out_pipe, O_CLOEXEC) != 0 || pipe2(err_pipe, O_CLOEXEC) != 0)
    throw BackendError(fmt::format("pipe: {}", std::strerror(errno)));

  const pid_t pid = fork();
  if (pid < 0)
    throw BackendError(fmt::format("fork: {}", std::strerror(errno)));
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    const int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0)
      dup2(devnull, STDERR_FILENO);
    execvp(argv[0], argv.data());
    const int e = errno;
    [[maybe_unused]] auto n = ::write(err_pipe[1], &e, sizeof e);
    _exit(127);
  }
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  int exec_errno = 0;
  const bool exec_failed = ::read(err_pipe[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno;
  ::close(err_pipe[0]);
  if (exec_failed) {
    ::close(out_pipe[0]);
    waitpid(pid, nullptr, 0);
    throw BackendError(fmt::format("cannot launch '{}': {}", words[0], std::strerror(exec_errno)));
  }

  std::string output;
  bool timed_out = false;
  char buf[65536];
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd p{out_pipe[0], POLLIN, 0};
    const int ready = poll(&p, 1, static_cast<int>(std::min<long long>(left, 1000)));
    if (ready < 0 && errno == EINTR)
      continue;
    if (ready < 0)
      break;
    if (ready == 0)
      continue;
    const ssize_t n = ::read(out_pipe[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR)
      continue;
    if (n <= 0)
      break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  ::close(out_pipe[0]);
  if (timed_out)
    kill(pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }

  SolveResult r;
  if (timed_out) {
    r.verdict = Verdict::Unknown;
    r.diagnostics = fmt::format("timeout after {:.3f}s; solver killed", timeout.count());
  } else {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (WIFSIGNALED(status))
      throw BackendError(fmt::format("solver terminated by signal {}", WTERMSIG(status)));
    r = parse_solver_output(output, code, cnf.variables);
  }
  r.solver = command_;
  r.seconds = Seconds(Clock::now() - start).count();
  return r;
}

// --- front end ------------------------------------------------------------------

std::unique_ptr<SatBackend> make_backend(const SolverConfig &config) {
  if (config.command.empty() || config.command == "picosat")
    return std::make_unique<PicosatBackend>();
  return std::make_unique<ProcessBackend>(config.command);
}

SolveResult solve(const CnfFormula &cnf, SatBackend &backend, Seconds timeout) {
  if (timeout.count() <= 0)
    throw Error("timeout must be positive");
  SolveResult r = backend.run(cnf, timeout);
  if (r.verdict == Verdict::Sat) {
    if (!r.witness)
      throw BackendError(fmt::format("{} reported SAT without a witness", backend.name()));
    if (!satisfies(cnf, *r.witness))
      throw BackendError(fmt::format("{} returned a witness that violates the formula", backend.name()));
  } else {
    r.witness.reset();
  }
  return r;
}

SolveResult solve(const CnfFormula &cnf, const SolverConfig &config) {
  auto backend = make_backend(config);
  return solve(cnf, *backend, config.timeout);
}

std::vector<Bipolar> decode_counterexample(const SolveResult &result, const CnfFormula &cnf, int input_width) {
  if (result.verdict != Verdict::Sat)
    throw Error(fmt::format("no counterexample: verdict is {}", to_string(result.verdict)));
  if (!result.witness)
    throw Error("SAT result carries no witness");
  if (static_cast<int>(cnf.input_vars.size()) != input_width)
    throw ShapeError(fmt::format("formula maps {} inputs, model has {}", cnf.input_vars.size(), input_width));
  std::vector<Bipolar> x;
  x.reserve(cnf.input_vars.size());
  for (int v : cnf.input_vars) {
    if (v < 1 || static_cast<std::size_t>(v) >= result.witness->size())
      throw ShapeError(fmt::format("input variable {} outside the witness", v));
    x.push_back(to_bipolar((*result.witness)[static_cast<std::size_t>(v)]));
  }
  return x;
}

} // namespace bnnv
