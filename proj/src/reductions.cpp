#include "bnnv/reductions.hpp"

#include "bnnv/cnf.hpp"
#include "bnnv/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>

namespace bnnv {

void validate(const Cnf3Instance &inst) {
  if (inst.variables < 0)
    throw ShapeError("negative variable count");
  for (const auto &cl : inst.clauses)
    for (int lit : cl)
      if (lit == 0 || std::abs(lit) > inst.variables)
        throw ShapeError(fmt::format("literal {} outside 1..{}", lit, inst.variables));
}

Cnf3Instance parse_cnf3(std::string_view dimacs) {
  const CnfFormula f = parse_dimacs(dimacs);
  Cnf3Instance inst{f.variables, {}};
  for (const auto &cl : f.clauses) {
    if (cl.empty() || cl.size() > 3)
      throw ParseError(fmt::format("clause of width {} in a 3-CNF", cl.size()));
    std::array<int, 3> c{};
    for (std::size_t k = 0; k < 3; ++k)
      c[k] = cl[std::min(k, cl.size() - 1)];
    inst.clauses.push_back(c);
  }
  return inst;
}

std::string serialize_cnf3(const Cnf3Instance &inst) {
  std::string out = fmt::format("p cnf {} {}\n", inst.variables, inst.clauses.size());
  for (const auto &c : inst.clauses)
    out += fmt::format("{} {} {} 0\n", c[0], c[1], c[2]);
  return out;
}

Cnf3Instance random_cnf3(int variables, int clauses, std::mt19937_64 &rng) {
  if (variables < 1 || clauses < 0)
    throw ShapeError("random 3-CNF needs at least one variable");
  std::uniform_int_distribution<int> var(1, variables);
  std::bernoulli_distribution neg(0.5);
  Cnf3Instance inst{variables, {}};
  for (int j = 0; j < clauses; ++j) {
    std::array<int, 3> c{};
    for (int &lit : c)
      lit = neg(rng) ? -var(rng) : var(rng);
    inst.clauses.push_back(c);
  }
  return inst;
}

bool eval_cnf3(const Cnf3Instance &inst, const std::vector<bool> &assignment) {
  if (static_cast<int>(assignment.size()) != inst.variables)
    throw ShapeError(fmt::format("assignment has {} values for {} variables", assignment.size(), inst.variables));
  return std::all_of(inst.clauses.begin(), inst.clauses.end(), [&](const auto &cl) {
    return std::any_of(cl.begin(), cl.end(), [&](int lit) {
      return assignment[static_cast<std::size_t>(std::abs(lit) - 1)] == (lit > 0);
    });
  });
}

bool brute_force_cnf3(const Cnf3Instance &inst) {
  validate(inst);
  if (inst.variables > 24)
    throw InstanceTooLarge(fmt::format("{} variables exceed the enumeration guard of 24", inst.variables));
  std::vector<bool> a(static_cast<std::size_t>(inst.variables));
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << inst.variables); ++bits) {
    for (int v = 0; v < inst.variables; ++v)
      a[static_cast<std::size_t>(v)] = (bits >> v) & 1;
    if (eval_cnf3(inst, a))
      return true;
  }
  return false;
}

Sat3Reduction sat3_to_bnn(const Cnf3Instance &inst) {
  validate(inst);
  if (inst.clauses.empty())
    throw ShapeError("3-CNF without clauses has no reduced network");
  const int m = inst.variables;
  const int n = static_cast<int>(inst.clauses.size());

  // coeff[j][v-1] = a_{v,j}; the switch variable m+1 has -1 in every clause.
  std::vector<std::vector<int>> coeff(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(m + 1), 0));
  for (int j = 0; j < n; ++j) {
    for (int lit : inst.clauses[static_cast<std::size_t>(j)])
      coeff[j][static_cast<std::size_t>(std::abs(lit) - 1)] += lit > 0 ? -1 : 1;
    coeff[j][static_cast<std::size_t>(m)] = -1;
  }

  Sat3Reduction r{BnnModel({Layer(1, 1)}), out_ge(1, 0), {}, {}, m};
  int width = 0;
  for (int v = 0; v <= m; ++v) {
    int most = 0;
    for (int j = 0; j < n; ++j)
      most = std::max(most, std::abs(coeff[j][static_cast<std::size_t>(v)]));
    r.first_input.push_back(width);
    r.copies.push_back(std::max(2, 2 * most));
    width += r.copies.back();
  }

  Layer layer(width, n);
  for (int j = 0; j < n; ++j) {
    layer.set_weight(j, 0, -1);
    for (int v = 0; v <= m; ++v) {
      const int k_v = r.copies[static_cast<std::size_t>(v)];
      const int plus = (k_v + 2 * coeff[j][static_cast<std::size_t>(v)]) / 2;
      for (int k = 0; k < k_v; ++k)
        layer.set_weight(j, 1 + r.first_input[static_cast<std::size_t>(v)] + k, k < plus ? 1 : -1);
    }
  }
  const int threshold = activation_threshold(layer.fan_in());
  r.model = BnnModel({std::move(layer)});

  std::vector<Property> parts;
  for (int v = 0; v <= m; ++v) {
    const int a = r.first_input[static_cast<std::size_t>(v)] + 1;
    for (int k = 1; k < r.copies[static_cast<std::size_t>(v)]; ++k) {
      const int b = a + k;
      parts.push_back((Property(InputAtom{a, 1}) && InputAtom{b, 1}) ||
                      (Property(InputAtom{a, 0}) && InputAtom{b, 0}));
    }
  }
  parts.push_back(InputAtom{r.first_input[static_cast<std::size_t>(m)] + 1, 1});
  for (int j = 1; j <= n; ++j)
    parts.push_back(OutputAtom{j, Relation::Lt, threshold});
  r.property = Property::all_of(std::move(parts));
  return r;
}

std::vector<bool> decode_sat3_witness(const Sat3Reduction &r, std::span<const Bipolar> input) {
  if (static_cast<int>(input.size()) != r.model.input_width() ||
      static_cast<int>(r.first_input.size()) != r.variables + 1)
    throw ShapeError(fmt::format("vector of width {} does not belong to the reduced network", input.size()));
  std::vector<bool> a;
  for (int v = 0; v < r.variables; ++v)
    a.push_back(input[static_cast<std::size_t>(r.first_input[static_cast<std::size_t>(v)])] > 0);
  return a;
}

std::vector<Bipolar> encode_sat3_assignment(const Sat3Reduction &r, const std::vector<bool> &assignment) {
  if (static_cast<int>(assignment.size()) != r.variables)
    throw ShapeError("assignment size differs from the variable count");
  std::vector<Bipolar> x(static_cast<std::size_t>(r.model.input_width()));
  for (int v = 0; v <= r.variables; ++v) {
    const bool value = v == r.variables || assignment[static_cast<std::size_t>(v)];
    for (int k = 0; k < r.copies[static_cast<std::size_t>(v)]; ++k)
      x[static_cast<std::size_t>(r.first_input[static_cast<std::size_t>(v)] + k)] = value ? 1 : -1;
  }
  return x;
}

} // namespace bnnv
