#include "bnnv/error.hpp"
#include "bnnv/pipeline.hpp"
#include "bnnv/reductions.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace bnnv;
using bnnv::testing::random_property;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string &args) {
  const std::string cmd = std::string(BNNV_CLI) + " " + args + " 2>/dev/null";
  FILE *p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p))
    out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("bnnv-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string &name, const std::string &contents) const {
    const auto p = path_ / name;
    std::ofstream(p) << contents;
    return p.string();
  }
  std::string path(const std::string &name) const { return (path_ / name).string(); }

private:
  static inline int counter_ = 0;
  fs::path path_;
};

const char *kWorkedModel = "layers 1\ndims 4 1\nweights 1\n-1 1 -1 -1 1\n";

TEST(Pipeline, VerifyAgreesWithBruteForce) {
  std::mt19937_64 rng(109);
  int risk = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::vector<int> dims = {4 + trial % 9, 6, 5, 3};
    const BnnModel model = random_model(dims, rng);
    const Property p = random_property(rng, 2, dims[0], 3, model.output_fan_in());
    const auto bf = brute_force_verify(model, p);
    for (auto mode : {FactoringMode::Off, FactoringMode::Heuristic}) {
      VerifyOptions opts;
      opts.factoring = mode;
      const auto r = verify(model, p, opts);
      ASSERT_EQ(r.verdict, bf.risk ? Verdict::Sat : Verdict::Unsat);
      if (bf.risk) {
        const auto bits = bipolar_to_bits(*r.counterexample);
        ASSERT_TRUE(eval_property(p, bits, eval_boolean(model, bits).output_counts));
      }
    }
    risk += bf.risk;
  }
  EXPECT_GT(risk, 5);
}

TEST(Pipeline, ReportContents) {
  std::mt19937_64 rng(113);
  const std::vector<int> dims = {10, 12, 2};
  const BnnModel model = random_model(dims, rng);
  VerifyOptions opts;
  opts.factoring = FactoringMode::Heuristic;
  const auto r = verify(model, parse_property("out[1] >= 0"), opts);
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_GT(r.saving, 0);
  EXPECT_GT(r.gates.logic_gates, 0u);
  EXPECT_GT(r.cnf_clauses, 0u);
  const auto text = format_text(r);
  EXPECT_NE(text.find("verdict: RISK"), std::string::npos);
  EXPECT_NE(text.find("counterexample:"), std::string::npos);
  const auto j = nlohmann::json::parse(format_json(r));
  EXPECT_EQ(j["verdict"], "RISK");
  EXPECT_EQ(j["counterexample"]["input"].size(), 10u);
  EXPECT_EQ(j["factoring"]["saving"], r.saving);
}

TEST(Pipeline, BruteForceGuard) {
  const BnnModel model({Layer(21, 1)});
  EXPECT_THROW(brute_force_verify(model, out_ge(1, 1)), InstanceTooLarge);
}

TEST(Pipeline, EmitCnfFile) {
  TempDir dir;
  const BnnModel model = parse_model(kWorkedModel);
  VerifyOptions opts;
  opts.emit_cnf = dir.path("m.cnf");
  verify(model, out_ge(1, 3), opts);
  std::ifstream in(opts.emit_cnf);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("c input 1 ", 0), 0u);
}

TEST(Pipeline, ExitCodes) {
  EXPECT_EQ(exit_code(Verdict::Unsat), 0);
  EXPECT_EQ(exit_code(Verdict::Sat), 1);
  EXPECT_EQ(exit_code(Verdict::Unknown), 2);
}

// --- command line ------------------------------------------------------------------

TEST(Cli, VerifySafeAndRisk) {
  TempDir dir;
  const auto model = dir.file("m.txt", kWorkedModel);
  auto r = run_cli("verify --model " + model + " --property 'out[1] >= 6'");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verdict: SAFE"), std::string::npos);
  r = run_cli("verify --model " + model + " --property 'out[1] >= 4' --factoring off");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("counterexample:"), std::string::npos);
  const auto prop = dir.file("p.txt", "# threshold\nout[1] >= 4\n");
  r = run_cli("verify --model " + model + " --property " + prop + " --report structured --solver " + BNNV_PICOSAT);
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.out)["verdict"], "RISK");
}

TEST(Cli, VerifyUnknownOnTimeout) {
  TempDir dir;
  const auto model = dir.file("m.txt", kWorkedModel);
  const auto r = run_cli("verify --model " + model + " --property 'out[1] >= 4' --timeout 0.3 --solver '" +
                         std::string(BNNV_PICOSAT) + " --delay 20'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("verdict: UNKNOWN"), std::string::npos);
}

TEST(Cli, Errors) {
  TempDir dir;
  const auto model = dir.file("m.txt", kWorkedModel);
  EXPECT_GE(run_cli("verify --model " + dir.path("missing") + " --property 'out[1] >= 1'").code, 10);
  EXPECT_EQ(run_cli("verify --model " + model + " --property 'out[1] >='").code, 11);
  EXPECT_EQ(run_cli("verify --model " + model + " --property 'out[2] >= 1'").code, 12);
  EXPECT_EQ(run_cli("verify --model " + model + " --property 'out[1] >= 1' --solver /nonexistent").code, 13);
  EXPECT_GE(run_cli("verify --model " + model + " --property 'out[1] >= 1' --timeout 0").code, 10);
  EXPECT_GE(run_cli("").code, 10);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST(Cli, EncodeFactorEval) {
  TempDir dir;
  const auto model = dir.file("m.txt", kWorkedModel);
  auto r = run_cli("encode --model " + model + " --property 'out[1] >= 3'");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("p cnf "), std::string::npos);
  r = run_cli("eval --model " + model + " --input '1 -1 1 1'");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("output sums: 1"), std::string::npos);
  EXPECT_NE(r.out.find("output counts: 3"), std::string::npos);
  const auto matrix = dir.file("w.txt", "matrix 3 6\n0 1 0 1 1 1\n0 0 0 0 0 0\n1 0 1 0 0 0\n");
  r = run_cli("factor --matrix " + matrix + " --optimal 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("total saving 6"), std::string::npos);
  EXPECT_NE(r.out.find("optimal saving with 2 factorings: 6"), std::string::npos);
}

TEST(Cli, GeneratorsAndBruteForce) {
  TempDir dir;
  const auto cnf = dir.file("f.cnf", "p cnf 3 2\n1 -2 3 0\n-1 2 0\n");
  auto r = run_cli("gen-3sat --cnf " + cnf + " --out-model " + dir.path("r.txt") + " --out-property " +
                   dir.path("r.prop"));
  ASSERT_EQ(r.code, 0);
  r = run_cli("verify --model " + dir.path("r.txt") + " --property " + dir.path("r.prop"));
  EXPECT_EQ(r.code, 1);

  const auto graph = dir.file("g.txt", "bipartite 2 2\ne 1 1\ne 1 2\ne 2 1\ne 2 2\n");
  r = run_cli("gen-meb --graph " + graph + " -o " + dir.path("w.txt"));
  ASSERT_EQ(r.code, 0);
  r = run_cli("factor --matrix " + dir.path("w.txt") + " --optimal 1");
  EXPECT_NE(r.out.find("optimal saving with 1 factorings: 4"), std::string::npos);

  r = run_cli("gen-model --dims 6,4,2 --seed 5 -o " + dir.path("g.txt"));
  ASSERT_EQ(r.code, 0);
  const auto again = run_cli("gen-model --dims 6,4,2 --seed 5");
  std::ifstream in(dir.path("g.txt"));
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), again.out);
  for (const char *prop : {"out[1] >= 3", "out[1] >= 5 && out[2] >= 5", "out[2] < 1"}) {
    const auto bf = run_cli("bruteforce --model " + dir.path("g.txt") + " --property '" + prop + "'");
    const auto sv = run_cli("verify --model " + dir.path("g.txt") + " --property '" + prop + "'");
    EXPECT_EQ(bf.code, sv.code) << prop;
  }
}

} // namespace
