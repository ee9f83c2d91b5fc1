#pragma once

#include "bnnv/property.hpp"

#include <random>

namespace bnnv::testing {

/// Random property AST of bounded depth over the given index ranges.
inline Property random_property(std::mt19937_64 &rng, int depth, int inputs, int outputs, int fan_in) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 1);
  switch (pick(rng)) {
  case 0: {
    std::uniform_int_distribution<int> idx(1, outputs), c(0, fan_in + 1), rel(0, 4);
    return OutputAtom{idx(rng), static_cast<Relation>(rel(rng)), c(rng)};
  }
  case 1: {
    std::uniform_int_distribution<int> idx(1, inputs), bit(0, 1);
    return InputAtom{idx(rng), static_cast<Bit>(bit(rng))};
  }
  case 2: return !random_property(rng, depth - 1, inputs, outputs, fan_in);
  case 3:
    return random_property(rng, depth - 1, inputs, outputs, fan_in) &&
           random_property(rng, depth - 1, inputs, outputs, fan_in);
  case 4:
    return random_property(rng, depth - 1, inputs, outputs, fan_in) ||
           random_property(rng, depth - 1, inputs, outputs, fan_in);
  default:
    return implies(random_property(rng, depth - 1, inputs, outputs, fan_in),
                   random_property(rng, depth - 1, inputs, outputs, fan_in));
  }
}

} // namespace bnnv::testing
