#pragma once

#include "bnnv/circuit.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace bnnv {

using Clause = std::vector<int>;

struct CnfFormula {
  int variables = 0;
  std::vector<Clause> clauses;
  /// varmap[net] = DIMACS variable of the net, 0 if the net is not encoded.
  std::vector<int> varmap;
  /// input_vars[k] = variable of primary input k.
  std::vector<int> input_vars;

  int var_of(NetId n) const;
  /// Appends a clause after dropping duplicate literals; tautologies are
  /// skipped. Throws ShapeError on literal 0 or out of range.
  void add_clause(Clause c);
};

/// Tseitin transformation of the cone of influence of the circuit output,
/// plus a unit clause asserting the output. Primary inputs always get
/// variables 1..n, in order.
CnfFormula tseitin_encode(const Circuit &c);

/// `p cnf V C` header, one zero-terminated clause per line, preceded by
/// `c input k v` comment lines (k is 1-based).
std::string emit_dimacs(const CnfFormula &cnf);

/// Accepts comments anywhere, clauses spanning lines and `c input` maps.
CnfFormula parse_dimacs(std::string_view text);

/// Every clause has a true literal. assignment[v] is the value of variable v
/// (index 0 unused).
bool satisfies(const CnfFormula &cnf, const std::vector<Bit> &assignment);

} // namespace bnnv
