#include "bnnv/cnf.hpp"

#include "bnnv/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>

namespace bnnv {

int CnfFormula::var_of(NetId n) const {
  const auto i = index_of(n);
  if (i >= varmap.size() || varmap[i] == 0)
    throw ShapeError(fmt::format("net {} has no variable", i));
  return varmap[i];
}

void CnfFormula::add_clause(Clause c) {
  for (int lit : c)
    if (lit == 0 || std::abs(lit) > variables)
      throw ShapeError(fmt::format("literal {} outside 1..{}", lit, variables));
  std::sort(c.begin(), c.end(), [](int a, int b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
  });
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (std::size_t k = 1; k < c.size(); ++k)
    if (c[k] == -c[k - 1])
      return;
  clauses.push_back(std::move(c));
}

namespace {

class Encoder {
public:
  explicit Encoder(CnfFormula &cnf) : cnf_(cnf) {}

  int fresh() { return ++cnf_.variables; }

  void and2(int o, int a, int b) {
    cnf_.add_clause({-o, a});
    cnf_.add_clause({-o, b});
    cnf_.add_clause({o, -a, -b});
  }
  void or2(int o, int a, int b) {
    cnf_.add_clause({o, -a});
    cnf_.add_clause({o, -b});
    cnf_.add_clause({-o, a, b});
  }
  void xor2(int o, int a, int b) {
    cnf_.add_clause({-o, a, b});
    cnf_.add_clause({-o, -a, -b});
    cnf_.add_clause({o, -a, b});
    cnf_.add_clause({o, a, -b});
  }
  void not1(int o, int a) {
    cnf_.add_clause({o, a});
    cnf_.add_clause({-o, -a});
  }

private:
  CnfFormula &cnf_;
};

} // namespace

CnfFormula tseitin_encode(const Circuit &c) {
  const auto &gates = c.gates();
  const NetId out = c.output();

  // Cone of influence, by gate index.
  std::vector<char> live(gates.size(), 0);
  {
    std::vector<std::uint32_t> stack;
    auto mark = [&](NetId n) {
      const std::uint32_t g = static_cast<std::uint32_t>(&c.driver(n) - gates.data());
      if (!live[g]) {
        live[g] = 1;
        stack.push_back(g);
      }
    };
    mark(out);
    while (!stack.empty()) {
      const Gate &g = gates[stack.back()];
      stack.pop_back();
      for (std::size_t k = 0; k < g.arity; ++k)
        mark(g.operands[k]);
    }
  }

  CnfFormula cnf;
  cnf.varmap.assign(c.net_count(), 0);
  for (NetId in : c.inputs()) {
    const int v = ++cnf.variables;
    cnf.varmap[index_of(in)] = v;
    cnf.input_vars.push_back(v);
  }

  Encoder enc(cnf);
  for (std::size_t id = 0; id < gates.size(); ++id) {
    if (!live[id])
      continue;
    const Gate &g = gates[id];
    if (g.kind == GateKind::Input)
      continue;
    auto op = [&](int k) { return cnf.var_of(g.operands[static_cast<std::size_t>(k)]); };
    const int o = enc.fresh();
    cnf.varmap[index_of(g.out)] = o;
    switch (g.kind) {
    case GateKind::Const:
      cnf.add_clause({g.out == kTrue ? o : -o});
      break;
    case GateKind::Input: break;
    case GateKind::Not: enc.not1(o, op(0)); break;
    case GateKind::And: enc.and2(o, op(0), op(1)); break;
    case GateKind::Or: enc.or2(o, op(0), op(1)); break;
    case GateKind::Xor: enc.xor2(o, op(0), op(1)); break;
    case GateKind::Xnor: enc.xor2(-o, op(0), op(1)); break;
    case GateKind::HalfAdder: {
      const int carry = enc.fresh();
      cnf.varmap[index_of(g.carry)] = carry;
      enc.xor2(o, op(0), op(1));
      enc.and2(carry, op(0), op(1));
      break;
    }
    case GateKind::FullAdder: {
      // t = a ^ b, sum = t ^ c, carry = (a & b) | (c & t)
      const int carry = enc.fresh();
      cnf.varmap[index_of(g.carry)] = carry;
      const int t = enc.fresh();
      const int ab = enc.fresh();
      const int ct = enc.fresh();
      enc.xor2(t, op(0), op(1));
      enc.xor2(o, t, op(2));
      enc.and2(ab, op(0), op(1));
      enc.and2(ct, op(2), t);
      enc.or2(carry, ab, ct);
      break;
    }
    }
  }
  cnf.add_clause({cnf.var_of(out)});
  return cnf;
}

std::string emit_dimacs(const CnfFormula &cnf) {
  std::string out;
  for (std::size_t k = 0; k < cnf.input_vars.size(); ++k)
    out += fmt::format("c input {} {}\n", k + 1, cnf.input_vars[k]);
  out += fmt::format("p cnf {} {}\n", cnf.variables, cnf.clauses.size());
  for (const auto &cl : cnf.clauses) {
    for (int lit : cl) {
      out += fmt::format("{}", lit);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula cnf;
  bool header = false;
  std::size_t declared = 0;
  std::vector<std::pair<int, int>> inputs;
  Clause current;
  int line_no = 0;

  auto fail = [&](const std::string &msg) -> void {
    throw ParseError(fmt::format("dimacs line {}: {}", line_no, msg));
  };
  auto split = [](std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
        ++i;
      const std::size_t s = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
        ++i;
      if (i > s)
        toks.push_back(line.substr(s, i - s));
    }
    return toks;
  };
  auto to_int = [&](std::string_view tok) {
    long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
      fail(fmt::format("bad integer '{}'", tok));
    return v;
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto toks = split(line);
    if (toks.empty())
      continue;
    if (toks[0] == "c") {
      if (toks.size() == 4 && toks[1] == "input")
        inputs.emplace_back(static_cast<int>(to_int(toks[2])), static_cast<int>(to_int(toks[3])));
      continue;
    }
    if (toks[0] == "%")
      break;
    if (toks[0] == "p") {
      if (header)
        fail("duplicate header");
      if (toks.size() != 4 || toks[1] != "cnf")
        fail("expected 'p cnf <vars> <clauses>'");
      const long v = to_int(toks[2]);
      const long c = to_int(toks[3]);
      if (v < 0 || c < 0)
        fail("negative counts");
      cnf.variables = static_cast<int>(v);
      declared = static_cast<std::size_t>(c);
      header = true;
      continue;
    }
    if (!header)
      fail("clause before header");
    for (auto tok : toks) {
      const long lit = to_int(tok);
      if (lit == 0) {
        cnf.clauses.push_back(current);
        current.clear();
        continue;
      }
      if (std::labs(lit) > cnf.variables)
        fail(fmt::format("literal {} exceeds declared {} variables", lit, cnf.variables));
      current.push_back(static_cast<int>(lit));
    }
  }
  if (!header)
    throw ParseError("dimacs: missing 'p cnf' header");
  if (!current.empty())
    throw ParseError("dimacs: last clause is not terminated by 0");
  if (cnf.clauses.size() != declared)
    throw ParseError(fmt::format("dimacs: header declares {} clauses, found {}", declared, cnf.clauses.size()));

  std::sort(inputs.begin(), inputs.end());
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k].first != static_cast<int>(k) + 1 || inputs[k].second < 1 || inputs[k].second > cnf.variables)
      throw ParseError("dimacs: malformed input map");
    cnf.input_vars.push_back(inputs[k].second);
  }
  return cnf;
}

bool satisfies(const CnfFormula &cnf, const std::vector<Bit> &assignment) {
  if (assignment.size() < static_cast<std::size_t>(cnf.variables) + 1)
    return false;
  for (const auto &cl : cnf.clauses) {
    bool sat = false;
    for (int lit : cl)
      if ((assignment[static_cast<std::size_t>(std::abs(lit))] != 0) == (lit > 0)) {
        sat = true;
        break;
      }
    if (!sat)
      return false;
  }
  return true;
}

} // namespace bnnv
