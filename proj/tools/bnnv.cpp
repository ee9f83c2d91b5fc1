// bnnv: verification driver.
//
// Exit status: 0 SAFE, 1 RISK, 2 UNKNOWN for verify and bruteforce; 0 for
// the other commands on success; 10 and above on errors.

#include "bnnv/error.hpp"
#include "bnnv/factoring.hpp"
#include "bnnv/pipeline.hpp"
#include "bnnv/reductions.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace bnnv;

namespace {

enum ErrorCode { kUsage = 10, kParse = 11, kShape = 12, kBackend = 13, kTooLarge = 14, kIo = 15 };

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::ios_base::failure(fmt::format("cannot read '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
  if (!out)
    throw std::ios_base::failure(fmt::format("cannot write '{}'", path));
}

/// A property argument is a file path when such a file exists, otherwise
/// inline property text.
Property load_property(const std::string &arg) {
  if (std::filesystem::is_regular_file(arg)) {
    std::string text = read_file(arg);
    std::string body;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      body += line + ' ';
    }
    return parse_property(body);
  }
  return parse_property(arg);
}

std::vector<Bipolar> parse_input_vector(const std::string &text) {
  std::vector<Bipolar> x;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == "1" || tok == "+1")
      x.push_back(1);
    else if (tok == "-1")
      x.push_back(-1);
    else
      throw ParseError(fmt::format("input value '{}' is not +1 or -1", tok));
  }
  return x;
}

std::string join(std::span<const int> xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k)
    s += fmt::format("{}{}", k ? " " : "", xs[k]);
  return s;
}

struct Common {
  std::string model;
  std::string property;
  std::string factoring = "heuristic";
  int block_rows = 64;
  int block_cols = 64;
  std::string solver;
  double timeout = 300;
  std::string emit_cnf;
  std::string report = "text";
  std::string output;
  std::uint64_t seed = 1;
};

void add_model_property(CLI::App *cmd, Common &c) {
  cmd->add_option("--model", c.model, "Model file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--property", c.property, "Property file or inline property text")->required();
}

void add_factoring(CLI::App *cmd, Common &c) {
  cmd->add_option("--factoring", c.factoring, "Factoring mode")
      ->check(CLI::IsMember({"off", "heuristic", "partitioned"}));
  cmd->add_option("--block-rows", c.block_rows, "Partition block height")->check(CLI::PositiveNumber);
  cmd->add_option("--block-cols", c.block_cols, "Partition block width")->check(CLI::PositiveNumber);
}

int run(int argc, char **argv) {
  CLI::App app{"SAT-based verification of binarized neural networks"};
  app.require_subcommand(1);
  Common c;

  auto *verify_cmd = app.add_subcommand("verify", "Decide whether the risk property is reachable");
  add_model_property(verify_cmd, c);
  add_factoring(verify_cmd, c);
  verify_cmd->add_option("--solver", c.solver, "External solver command (default: built-in PicoSAT)");
  verify_cmd->add_option("--timeout", c.timeout, "Solver timeout in seconds")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--emit-cnf", c.emit_cnf, "Also write the DIMACS formula here");
  verify_cmd->add_option("--report", c.report, "Report format")->check(CLI::IsMember({"text", "structured"}));

  auto *encode_cmd = app.add_subcommand("encode", "Write the miter as DIMACS CNF");
  add_model_property(encode_cmd, c);
  add_factoring(encode_cmd, c);
  encode_cmd->add_option("--emit-cnf,-o", c.emit_cnf, "Output path (default: stdout)");

  auto *factor_cmd = app.add_subcommand("factor", "Report the factorings of a model or weight matrix");
  std::string matrix;
  auto *factor_src = factor_cmd->add_option_group("source");
  factor_src->add_option("--model", c.model, "Model file")->check(CLI::ExistingFile);
  factor_src->add_option("--matrix", matrix, "Weight matrix file")->check(CLI::ExistingFile);
  factor_src->require_option(1);
  add_factoring(factor_cmd, c);
  int brute_k = 0;
  factor_cmd->add_option("--optimal", brute_k, "Also compute the exact optimum over k factorings (matrix only)");

  auto *eval_cmd = app.add_subcommand("eval", "Evaluate a model on a bipolar input vector");
  std::string input;
  eval_cmd->add_option("--model", c.model, "Model file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--input", input, "Whitespace-separated +1/-1 values")->required();

  auto *sat3_cmd = app.add_subcommand("gen-3sat", "Reduce a 3-CNF to a model and a risk property");
  std::string cnf_path, out_model, out_property;
  int rand_vars = 0, rand_clauses = 0;
  auto *sat3_src = sat3_cmd->add_option_group("source");
  sat3_src->add_option("--cnf", cnf_path, "DIMACS 3-CNF file")->check(CLI::ExistingFile);
  sat3_src->add_option("--random", rand_vars, "Generate a random instance with this many variables");
  sat3_src->require_option(1);
  sat3_cmd->add_option("--clauses", rand_clauses, "Clause count for --random")->check(CLI::NonNegativeNumber);
  sat3_cmd->add_option("--seed", c.seed, "Random seed");
  sat3_cmd->add_option("--out-model", out_model, "Model output path")->required();
  sat3_cmd->add_option("--out-property", out_property, "Property output path")->required();

  auto *meb_cmd = app.add_subcommand("gen-meb", "Reduce a bipartite graph to a weight matrix");
  std::string graph_path;
  meb_cmd->add_option("--graph", graph_path, "Bipartite graph file")->required()->check(CLI::ExistingFile);
  meb_cmd->add_option("--out,-o", c.output, "Output path (default: stdout)");

  auto *brute_cmd = app.add_subcommand("bruteforce", "Decide the property by enumerating all inputs");
  add_model_property(brute_cmd, c);

  auto *gen_cmd = app.add_subcommand("gen-model", "Write a model with uniformly random weights");
  std::vector<int> dims;
  gen_cmd->add_option("--dims", dims, "Layer widths, inputs first")->required()->delimiter(',');
  gen_cmd->add_option("--seed", c.seed, "Random seed");
  gen_cmd->add_option("--out,-o", c.output, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  const BlockSize block{c.block_rows, c.block_cols};

  if (*verify_cmd) {
    const BnnModel model = load_model(c.model);
    const Property property = load_property(c.property);
    VerifyOptions opts;
    opts.factoring = parse_factoring_mode(c.factoring);
    opts.block = block;
    opts.solver.command = c.solver;
    opts.solver.timeout = Seconds(c.timeout);
    opts.emit_cnf = c.emit_cnf;
    const VerifyReport r = verify(model, property, opts);
    std::cout << (c.report == "structured" ? format_json(r) : format_text(r));
    return exit_code(r.verdict);
  }
  if (*encode_cmd) {
    const BnnModel model = load_model(c.model);
    const Property property = load_property(c.property);
    const Encoding e = encode(model, property, parse_factoring_mode(c.factoring), block);
    write_output(c.emit_cnf, emit_dimacs(e.cnf));
    if (!c.emit_cnf.empty() && c.emit_cnf != "-")
      std::cout << fmt::format("wrote {} variables, {} clauses (saving {}, {} logic gates)\n", e.cnf.variables,
                               e.cnf.clauses.size(), total_saving(e.factoring), e.gates.logic_gates);
    return 0;
  }
  if (*factor_cmd) {
    const FactoringMode mode = parse_factoring_mode(c.factoring);
    if (!c.model.empty()) {
      std::cout << factoring_report(factor_model(load_model(c.model), mode, block));
      return 0;
    }
    const WeightMatrix m = parse_weight_matrix(read_file(matrix));
    ModelFactoring f;
    if (mode == FactoringMode::Heuristic)
      f.push_back(find_factorings(m));
    else if (mode == FactoringMode::Partitioned)
      f.push_back(find_factorings_partitioned(m, block));
    else
      f.emplace_back(m.rows(), m.cols());
    std::cout << factoring_report(f);
    if (brute_k > 0) {
      const auto opt = brute_force_optimal_factorings(m, brute_k);
      std::cout << fmt::format("optimal saving with {} factorings: {}\n", brute_k, opt.total_saving);
    }
    return 0;
  }
  if (*eval_cmd) {
    const BnnModel model = load_model(c.model);
    const auto x = parse_input_vector(input);
    const auto bip = eval_bipolar(model, x);
    const auto boo = eval_boolean(model, bipolar_to_bits(x));
    std::cout << fmt::format("output sums: {}\n", join(bip.outputs));
    std::cout << fmt::format("output counts: {}\n", join(boo.output_counts));
    return 0;
  }
  if (*sat3_cmd) {
    Cnf3Instance inst;
    if (!cnf_path.empty()) {
      inst = parse_cnf3(read_file(cnf_path));
    } else {
      std::mt19937_64 rng(c.seed);
      inst = random_cnf3(rand_vars, rand_clauses, rng);
    }
    const Sat3Reduction r = sat3_to_bnn(inst);
    write_output(out_model, serialize_model(r.model));
    write_output(out_property, print_property(r.property) + "\n");
    return 0;
  }
  if (*meb_cmd) {
    const auto g = parse_bipartite_graph(read_file(graph_path));
    write_output(c.output, serialize_weight_matrix(reduce_meb_to_factoring(g)));
    return 0;
  }
  if (*brute_cmd) {
    const BnnModel model = load_model(c.model);
    const Property property = load_property(c.property);
    const auto r = brute_force_verify(model, property);
    const Verdict v = r.risk ? Verdict::Sat : Verdict::Unsat;
    std::cout << fmt::format("verdict: {}\nchecked: {}\n", verdict_label(v), r.checked);
    if (r.witness) {
      std::vector<int> x(r.witness->begin(), r.witness->end());
      std::cout << fmt::format("counterexample: {}\n", join(x));
    }
    return exit_code(v);
  }
  if (*gen_cmd) {
    std::mt19937_64 rng(c.seed);
    write_output(c.output, serialize_model(random_model(dims, rng)));
    return 0;
  }
  return kUsage;
}

} // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const ParseError &e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ShapeError &e) {
    std::cerr << "shape error: " << e.what() << '\n';
    return kShape;
  } catch (const BackendError &e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kBackend;
  } catch (const InstanceTooLarge &e) {
    std::cerr << "too large: " << e.what() << '\n';
    return kTooLarge;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
}
