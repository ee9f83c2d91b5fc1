// Stand-alone PicoSAT front end speaking the SAT-competition protocol:
//   bnnv_picosat [--delay SECONDS] FILE.cnf
// Prints `s SATISFIABLE` with `v` lines and exits 10, or
// `s UNSATISFIABLE` and exits 20. --delay sleeps before answering, for
// exercising solver timeouts.

#include "bnnv/cnf.hpp"
#include "bnnv/error.hpp"

extern "C" {
#include "picosat.h"
}

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

int main(int argc, char **argv) {
  double delay = 0;
  std::string path;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--delay" && i + 1 < argc)
      delay = std::stod(argv[++i]);
    else
      path = a;
  }
  if (path.empty()) {
    std::fprintf(stderr, "usage: bnnv_picosat [--delay SECONDS] FILE.cnf\n");
    return 1;
  }
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", path.c_str());
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  bnnv::CnfFormula cnf;
  try {
    cnf = bnnv::parse_dimacs(buf.str());
  } catch (const bnnv::Error &e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  if (delay > 0)
    std::this_thread::sleep_for(std::chrono::duration<double>(delay));

  PicoSAT *ps = picosat_init();
  picosat_adjust(ps, cnf.variables);
  for (const auto &cl : cnf.clauses) {
    for (int lit : cl)
      picosat_add(ps, lit);
    picosat_add(ps, 0);
  }
  const int res = picosat_sat(ps, -1);
  int code = 0;
  if (res == PICOSAT_SATISFIABLE) {
    std::printf("s SATISFIABLE\n");
    std::string line = "v";
    for (int v = 1; v <= cnf.variables; ++v) {
      line += ' ' + std::to_string(picosat_deref(ps, v) > 0 ? v : -v);
      if (line.size() > 70) {
        std::printf("%s\n", line.c_str());
        line = "v";
      }
    }
    std::printf("%s 0\n", line.c_str());
    code = 10;
  } else if (res == PICOSAT_UNSATISFIABLE) {
    std::printf("s UNSATISFIABLE\n");
    code = 20;
  } else {
    std::printf("s UNKNOWN\n");
  }
  picosat_reset(ps);
  return code;
}
