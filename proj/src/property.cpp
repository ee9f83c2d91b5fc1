#include "bnnv/property.hpp"

#include "bnnv/error.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>

namespace bnnv {

Property::Property(OutputAtom a) : node_(std::make_shared<const Node>(a)) {}
Property::Property(InputAtom a) : node_(std::make_shared<const Node>(a)) {}

bool operator==(const Property &a, const Property &b) {
  if (a.node_ == b.node_)
    return true;
  const auto &x = *a.node_;
  const auto &y = *b.node_;
  if (x.index() != y.index())
    return false;
  if (auto *p = std::get_if<OutputAtom>(&x))
    return *p == std::get<OutputAtom>(y);
  if (auto *p = std::get_if<InputAtom>(&x))
    return *p == std::get<InputAtom>(y);
  if (auto *p = std::get_if<NotNode>(&x))
    return p->operand == std::get<NotNode>(y).operand;
  const auto &bx = std::get<BinaryNode>(x);
  const auto &by = std::get<BinaryNode>(y);
  return bx.op == by.op && bx.lhs == by.lhs && bx.rhs == by.rhs;
}

Property operator!(Property p) {
  return Property(std::make_shared<const Property::Node>(NotNode{std::move(p)}));
}
Property operator&&(Property a, Property b) {
  return Property(std::make_shared<const Property::Node>(BinaryNode{Connective::And, std::move(a), std::move(b)}));
}
Property operator||(Property a, Property b) {
  return Property(std::make_shared<const Property::Node>(BinaryNode{Connective::Or, std::move(a), std::move(b)}));
}
Property implies(Property a, Property b) {
  return Property(
      std::make_shared<const Property::Node>(BinaryNode{Connective::Implies, std::move(a), std::move(b)}));
}

Property Property::all_of(std::vector<Property> parts) {
  if (parts.empty())
    throw ShapeError("conjunction of zero properties");
  Property acc = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k)
    acc = std::move(acc) && parts[k];
  return acc;
}

Property out_ge(int index, int c) { return OutputAtom{index, Relation::Ge, c}; }

std::string_view to_string(Relation rel) noexcept {
  switch (rel) {
  case Relation::Ge: return ">=";
  case Relation::Le: return "<=";
  case Relation::Eq: return "==";
  case Relation::Gt: return ">";
  case Relation::Lt: return "<";
  }
  return "?";
}

bool eval_relation(int value, Relation rel, int constant) noexcept {
  switch (rel) {
  case Relation::Ge: return value >= constant;
  case Relation::Le: return value <= constant;
  case Relation::Eq: return value == constant;
  case Relation::Gt: return value > constant;
  case Relation::Lt: return value < constant;
  }
  return false;
}

// --- parser -------------------------------------------------------------------

namespace {

class PropertyParser {
public:
  explicit PropertyParser(std::string_view text) : text_(text) {}

  Property parse() {
    Property p = implication();
    skip_ws();
    if (pos_ != text_.size())
      fail("unexpected trailing input");
    return p;
  }

private:
  Property implication() {
    Property lhs = disjunction();
    if (accept("->"))
      return implies(std::move(lhs), implication());
    return lhs;
  }

  Property disjunction() {
    Property acc = conjunction();
    while (accept("||"))
      acc = std::move(acc) || conjunction();
    return acc;
  }

  Property conjunction() {
    Property acc = unary();
    while (accept("&&"))
      acc = std::move(acc) && unary();
    return acc;
  }

  Property unary() {
    skip_ws();
    if (accept("!"))
      return !unary();
    if (accept("(")) {
      Property inner = implication();
      expect(")");
      return inner;
    }
    return atom();
  }

  Property atom() {
    if (accept("out")) {
      const int index = bracketed_index();
      const Relation rel = relation();
      const int c = integer();
      return OutputAtom{index, rel, c};
    }
    if (accept("in")) {
      const int index = bracketed_index();
      expect("==");
      const int b = integer();
      if (b != 0 && b != 1)
        fail("input atoms compare against 0 or 1");
      return InputAtom{index, static_cast<Bit>(b)};
    }
    fail("expected 'out[...]', 'in[...]', '!' or '('");
  }

  int bracketed_index() {
    expect("[");
    const int i = integer();
    expect("]");
    if (i < 1)
      fail("indices start at 1");
    return i;
  }

  Relation relation() {
    if (accept(">="))
      return Relation::Ge;
    if (accept("<="))
      return Relation::Le;
    if (accept("=="))
      return Relation::Eq;
    if (accept(">"))
      return Relation::Gt;
    if (accept("<"))
      return Relation::Lt;
    fail("expected a relation (>=, <=, ==, >, <)");
  }

  int integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+'))
      ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    std::string_view tok = text_.substr(start, pos_ - start);
    if (!tok.empty() && tok.front() == '+')
      tok.remove_prefix(1);
    int v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || p != tok.data() + tok.size()) {
      pos_ = start;
      fail("expected an integer");
    }
    return v;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool peek(std::string_view tok) {
    skip_ws();
    return text_.substr(pos_, tok.size()) == tok;
  }
  bool accept(std::string_view tok) {
    if (!peek(tok))
      return false;
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!accept(tok))
      fail(fmt::format("expected '{}'", tok));
  }
  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(fmt::format("property column {}: {}", pos_ + 1, msg));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int precedence(const Property &p) {
  if (auto *b = std::get_if<BinaryNode>(&p.node())) {
    switch (b->op) {
    case Connective::Implies: return 1;
    case Connective::Or: return 2;
    case Connective::And: return 3;
    }
  }
  return 4;
}

void print_into(const Property &p, std::string &out) {
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, OutputAtom>) {
          out += fmt::format("out[{}] {} {}", n.index, to_string(n.rel), n.constant);
        } else if constexpr (std::is_same_v<T, InputAtom>) {
          out += fmt::format("in[{}] == {}", n.index, static_cast<int>(n.value));
        } else if constexpr (std::is_same_v<T, NotNode>) {
          out += '!';
          const bool paren = precedence(n.operand) < 4;
          if (paren)
            out += '(';
          print_into(n.operand, out);
          if (paren)
            out += ')';
        } else {
          const int mine = precedence(p);
          // && and || associate left, -> associates right
          const bool right_assoc = n.op == Connective::Implies;
          const bool lparen = precedence(n.lhs) < mine || (right_assoc && precedence(n.lhs) == mine);
          const bool rparen = precedence(n.rhs) < mine || (!right_assoc && precedence(n.rhs) == mine);
          if (lparen)
            out += '(';
          print_into(n.lhs, out);
          if (lparen)
            out += ')';
          out += n.op == Connective::And ? " && " : n.op == Connective::Or ? " || " : " -> ";
          if (rparen)
            out += '(';
          print_into(n.rhs, out);
          if (rparen)
            out += ')';
        }
      },
      p.node());
}

} // namespace

Property parse_property(std::string_view text) { return PropertyParser(text).parse(); }

std::string print_property(const Property &p) {
  std::string out;
  print_into(p, out);
  return out;
}

PropertyExtent property_extent(const Property &p) {
  PropertyExtent e;
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, OutputAtom>) {
          e.max_output = n.index;
        } else if constexpr (std::is_same_v<T, InputAtom>) {
          e.max_input = n.index;
        } else if constexpr (std::is_same_v<T, NotNode>) {
          e = property_extent(n.operand);
        } else {
          auto a = property_extent(n.lhs);
          auto b = property_extent(n.rhs);
          e.max_input = std::max(a.max_input, b.max_input);
          e.max_output = std::max(a.max_output, b.max_output);
        }
      },
      p.node());
  return e;
}

void validate_property(const Property &p, const BnnModel &model) {
  std::visit(
      [&](const auto &n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, OutputAtom>) {
          if (n.index < 1 || n.index > model.output_width())
            throw ShapeError(fmt::format("out[{}] outside 1..{}", n.index, model.output_width()));
          if (n.constant < 0 || n.constant > model.output_fan_in() + 1)
            throw ShapeError(fmt::format("threshold {} outside 0..{}", n.constant, model.output_fan_in() + 1));
        } else if constexpr (std::is_same_v<T, InputAtom>) {
          if (n.index < 1 || n.index > model.input_width())
            throw ShapeError(fmt::format("in[{}] outside 1..{}", n.index, model.input_width()));
        } else if constexpr (std::is_same_v<T, NotNode>) {
          validate_property(n.operand, model);
        } else {
          validate_property(n.lhs, model);
          validate_property(n.rhs, model);
        }
      },
      p.node());
}

bool eval_property(const Property &p, std::span<const Bit> inputs, std::span<const int> output_counts) {
  return std::visit(
      [&](const auto &n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, OutputAtom>) {
          if (n.index < 1 || n.index > static_cast<int>(output_counts.size()))
            throw ShapeError(fmt::format("out[{}] outside 1..{}", n.index, output_counts.size()));
          return eval_relation(output_counts[static_cast<std::size_t>(n.index - 1)], n.rel, n.constant);
        } else if constexpr (std::is_same_v<T, InputAtom>) {
          if (n.index < 1 || n.index > static_cast<int>(inputs.size()))
            throw ShapeError(fmt::format("in[{}] outside 1..{}", n.index, inputs.size()));
          return inputs[static_cast<std::size_t>(n.index - 1)] == n.value;
        } else if constexpr (std::is_same_v<T, NotNode>) {
          return !eval_property(n.operand, inputs, output_counts);
        } else {
          const bool a = eval_property(n.lhs, inputs, output_counts);
          switch (n.op) {
          case Connective::And: return a && eval_property(n.rhs, inputs, output_counts);
          case Connective::Or: return a || eval_property(n.rhs, inputs, output_counts);
          case Connective::Implies: return !a || eval_property(n.rhs, inputs, output_counts);
          }
          return false;
        }
      },
      p.node());
}

} // namespace bnnv
