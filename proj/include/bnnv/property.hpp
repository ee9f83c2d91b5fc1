#pragma once

#include "bnnv/model.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bnnv {

enum class Relation { Ge, Le, Eq, Gt, Lt };

/// out[index] <rel> constant, over output counts (1-based index).
struct OutputAtom {
  int index;
  Relation rel;
  int constant;
  bool operator==(const OutputAtom &) const = default;
};

/// in[index] == bit (1-based index; in[j] is input x_j).
struct InputAtom {
  int index;
  Bit value;
  bool operator==(const InputAtom &) const = default;
};

enum class Connective { And, Or, Implies };

class Property;

struct NotNode;
struct BinaryNode;

/// Immutable risk property AST with value semantics (shared subtrees).
class Property {
public:
  using Node = std::variant<OutputAtom, InputAtom, NotNode, BinaryNode>;

  Property(OutputAtom a);
  Property(InputAtom a);

  const Node &node() const;

  friend bool operator==(const Property &a, const Property &b);

  friend Property operator!(Property p);
  friend Property operator&&(Property a, Property b);
  friend Property operator||(Property a, Property b);
  friend Property implies(Property a, Property b);

  /// Conjunction of a nonempty list, left-associated.
  static Property all_of(std::vector<Property> parts);

private:
  explicit Property(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct NotNode {
  Property operand;
};

struct BinaryNode {
  Connective op;
  Property lhs;
  Property rhs;
};

inline const Property::Node &Property::node() const { return *node_; }

Property operator!(Property p);
Property operator&&(Property a, Property b);
Property operator||(Property a, Property b);
Property implies(Property a, Property b);

Property out_ge(int index, int c);

/// Grammar:
///   expr    := implies
///   implies := or ( '->' implies )?          right associative
///   or      := and ( '||' and )*
///   and     := unary ( '&&' unary )*
///   unary   := '!' unary | '(' expr ')' | atom
///   atom    := 'out' '[' int ']' rel int | 'in' '[' int ']' '==' bit
///   rel     := '>=' | '<=' | '==' | '>' | '<'
Property parse_property(std::string_view text);
std::string print_property(const Property &p);

/// Largest referenced input and output indices (0 when none).
struct PropertyExtent {
  int max_input = 0;
  int max_output = 0;
};
PropertyExtent property_extent(const Property &p);

/// Throws ShapeError if an index is outside the model or an output constant
/// lies outside 0..output_fan_in+1.
void validate_property(const Property &p, const BnnModel &model);

/// Reference semantics over input bits and output counts.
bool eval_property(const Property &p, std::span<const Bit> inputs, std::span<const int> output_counts);

bool eval_relation(int value, Relation rel, int constant) noexcept;
std::string_view to_string(Relation rel) noexcept;

} // namespace bnnv
