#pragma once

// Scalar expression language for metric entries, span components and
// coefficient recipes.
//
// Grammar:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := ("-")? power
//   power  := atom ("^" number)*          (left associative)
//   atom   := number | ident | ident "(" expr ")" | "(" expr ")"
// Identifiers x1..x9 are chart coordinates, any other identifier is a
// parameter resolved at evaluation time. Functions: sin cos exp log sqrt.

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "folint/error.hpp"
#include "folint/jet.hpp"

namespace folint {

using ParameterTable = std::map<std::string, double, std::less<>>;

enum class NodeKind { kLiteral, kCoordinate, kParameter, kNegate, kAdd, kSub, kMul, kDiv, kPower, kCall };
enum class Function { kSin, kCos, kExp, kLog, kSqrt };

struct ExprNode {
  NodeKind kind = NodeKind::kLiteral;
  double number = 0.0;  // literal value, or the exponent of kPower
  int index = 0;        // zero-based coordinate index
  std::string name;     // parameter name
  Function fn = Function::kSin;
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

namespace detail {

template <class T>
T integer_power(const T& base_in, long long e) {
  T result = base_in;
  T base = base_in;
  bool first = true;
  while (e > 0) {
    if (e & 1) {
      result = first ? base : result * base;
      first = false;
    }
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

inline double apply(Function fn, double v) {
  switch (fn) {
    case Function::kSin: return std::sin(v);
    case Function::kCos: return std::cos(v);
    case Function::kExp: return std::exp(v);
    case Function::kLog:
      if (!(v > 0.0)) throw SingularityError("log of non-positive value");
      return std::log(v);
    case Function::kSqrt:
      if (v < 0.0) throw SingularityError("sqrt of negative value");
      return std::sqrt(v);
  }
  return 0.0;
}

inline Jet3 apply(Function fn, const Jet3& v) {
  switch (fn) {
    case Function::kSin: return sin(v);
    case Function::kCos: return cos(v);
    case Function::kExp: return exp(v);
    case Function::kLog: return log(v);
    case Function::kSqrt: return sqrt(v);
  }
  return v;
}

inline double power(double v, double c) {
  if (c == std::floor(c) && std::abs(c) <= 64.0) {
    const auto e = static_cast<long long>(c);
    if (e == 0) return 1.0;
    if (e > 0) return integer_power(v, e);
    if (v == 0.0) throw SingularityError("negative power of zero");
    return 1.0 / integer_power(v, -e);
  }
  if (!(v > 0.0)) throw SingularityError("non-integer power of non-positive value");
  return std::pow(v, c);
}

inline Jet3 power(const Jet3& v, double c) { return pow(v, c); }

inline double divide(double a, double b) {
  if (b == 0.0) throw SingularityError("division by zero");
  return a / b;
}
inline Jet3 divide(const Jet3& a, const Jet3& b) { return a / b; }

}  // namespace detail

class Expression {
 public:
  Expression() = default;

  /// Parses `text`; throws ParseError (with byte offset) on malformed input.
  static Expression parse(std::string_view text);
  static Expression constant(double value);

  const ExprNode& root() const { return *root_; }
  bool empty() const { return root_ == nullptr; }

  /// Canonical fully parenthesized rendering; parses back to the same tree.
  std::string to_string() const;

  /// Largest zero-based coordinate index used, or -1.
  int max_coordinate() const;
  std::set<std::string> parameter_names() const;

  double evaluate(std::span<const double> point, const ParameterTable& params) const;

  /// Jet expansion at `point` in point.size() variables.
  Jet3 evaluate_jet(std::span<const double> point, const ParameterTable& params, int order = Jet3::kMaxOrder) const;

  /// Generic evaluation: coordinates bound to `coords`; `lookup(name)` returns
  /// a pointer to the parameter's value or nullptr when unbound.
  template <class T, class Lookup>
  T evaluate_generic(std::span<const T> coords, const Lookup& lookup, const T& zero) const {
    if (!root_) throw InputError("evaluating an empty expression");
    return eval_node<T>(*root_, coords, lookup, zero);
  }

 private:
  explicit Expression(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}

  template <class T, class Lookup>
  static T eval_node(const ExprNode& n, std::span<const T> coords, const Lookup& lookup, const T& zero) {
    switch (n.kind) {
      case NodeKind::kLiteral: return zero + n.number;
      case NodeKind::kCoordinate:
        if (n.index >= static_cast<int>(coords.size()))
          throw InputError("coordinate x" + std::to_string(n.index + 1) + " is not bound");
        return coords[static_cast<std::size_t>(n.index)];
      case NodeKind::kParameter: {
        const T* v = lookup(std::string_view(n.name));
        if (v == nullptr) throw InputError("unbound parameter '" + n.name + "'");
        return *v;
      }
      case NodeKind::kNegate: return -eval_node<T>(*n.lhs, coords, lookup, zero);
      case NodeKind::kAdd: return eval_node<T>(*n.lhs, coords, lookup, zero) + eval_node<T>(*n.rhs, coords, lookup, zero);
      case NodeKind::kSub: return eval_node<T>(*n.lhs, coords, lookup, zero) - eval_node<T>(*n.rhs, coords, lookup, zero);
      case NodeKind::kMul: return eval_node<T>(*n.lhs, coords, lookup, zero) * eval_node<T>(*n.rhs, coords, lookup, zero);
      case NodeKind::kDiv:
        return detail::divide(eval_node<T>(*n.lhs, coords, lookup, zero), eval_node<T>(*n.rhs, coords, lookup, zero));
      case NodeKind::kPower: return detail::power(eval_node<T>(*n.lhs, coords, lookup, zero), n.number);
      case NodeKind::kCall: return detail::apply(n.fn, eval_node<T>(*n.lhs, coords, lookup, zero));
    }
    throw InputError("corrupt expression node");
  }

  std::shared_ptr<const ExprNode> root_;
};

}  // namespace folint
