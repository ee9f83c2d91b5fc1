#pragma once

#include "bnnv/model.hpp"
#include "bnnv/property.hpp"

#include <array>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace bnnv {

/// 3-CNF over variables 1..variables; literal -v is the negation of v.
struct Cnf3Instance {
  int variables = 0;
  std::vector<std::array<int, 3>> clauses;
};

/// Throws ShapeError on literal 0 or out of range.
void validate(const Cnf3Instance &inst);

/// DIMACS input; clauses shorter than 3 are padded by repeating their last
/// literal, longer or empty clauses are rejected.
Cnf3Instance parse_cnf3(std::string_view dimacs);
std::string serialize_cnf3(const Cnf3Instance &inst);

Cnf3Instance random_cnf3(int variables, int clauses, std::mt19937_64 &rng);

bool eval_cnf3(const Cnf3Instance &inst, const std::vector<bool> &assignment);
/// Exhaustive check, guarded to 24 variables.
bool brute_force_cnf3(const Cnf3Instance &inst);

/// Single-layer BNN with one neuron per clause and a risk property that holds
/// exactly on inputs encoding a satisfying assignment.
///
/// Variable x_v (v = 1..m+1, x_{m+1} the extra switch input) is fed through
/// copies[v-1] identical input bits, tied together by the property. With
/// s_j = sum over literals of clause j of (-x if positive, +x if negative)
/// - x_{m+1} - 1, neuron j computes 2*s_j + 1, which has the sign of s_j.
/// The property is
///   copies equal && x_{m+1} == +1 && out[j] < threshold for every j,
/// where out[j] < threshold means neuron j outputs -1 (clause satisfied).
struct Sat3Reduction {
  BnnModel model;
  Property property;
  /// first_input[v-1] = 0-based model input of the first copy of x_v.
  std::vector<int> first_input;
  std::vector<int> copies;
  int variables = 0;
};

Sat3Reduction sat3_to_bnn(const Cnf3Instance &inst);

/// x_v = true iff the first copy of x_v is +1. Throws ShapeError when the
/// vector does not match the reduced model.
std::vector<bool> decode_sat3_witness(const Sat3Reduction &r, std::span<const Bipolar> input);

/// Bipolar input vector encoding an assignment of x_1..x_m with x_{m+1} = +1.
std::vector<Bipolar> encode_sat3_assignment(const Sat3Reduction &r, const std::vector<bool> &assignment);

} // namespace bnnv
