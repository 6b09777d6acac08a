#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slantgeo/jet.hpp"

namespace slantgeo {

// Named real parameters (slant parameter t, constants a, b, ...).
using ParamMap = std::map<std::string, double, std::less<>>;

// Parameters bound to expression text instead of a number, e.g. t = "x1".
// The text is parsed in the chart of the expression that references it.
using BindingMap = std::map<std::string, std::string, std::less<>>;

enum class UnaryFn { neg, sin, cos, tan, sinh, cosh, exp, ln, sqrt };
enum class BinaryOp { add, sub, mul, div, pow };

namespace detail {
struct Node;
}

/// Immutable closed-form scalar function of chart coordinates x1..xn.
///
/// Cheap to copy (shared immutable tree) and safe to evaluate from several
/// threads at once. Grammar:
///
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := ("-")? power
///   power  := atom ("^" factor)?
///   atom   := number | ident | ident "(" expr ")" | "(" expr ")"
///
/// so `^` is right-associative and "-x1^2" is -(x1^2). The identifier `pi`
/// is a built-in constant unless a parameter of that name is given.
class ScalarExpr {
 public:
  ScalarExpr() = default;

  static ScalarExpr constant(double value, int dim);
  // Coordinate x_{index+1}; `index` is 0-based.
  static ScalarExpr coordinate(int index, int dim);

  int dim() const { return dim_; }
  bool empty() const { return root_ == nullptr; }
  // True when the value does not depend on any coordinate.
  bool is_constant() const;

  double eval(std::span<const double> point) const;
  Jet2 eval_jet2(std::span<const double> point) const;

  // Fully parenthesized text that re-parses to an expression with identical values.
  std::string to_string() const;

  friend ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b);
  friend ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b);
  friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b);
  friend ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b);
  friend ScalarExpr operator-(const ScalarExpr& a);

  explicit ScalarExpr(std::shared_ptr<const detail::Node> root, int dim)
      : root_(std::move(root)), dim_(dim) {}
  const std::shared_ptr<const detail::Node>& root() const { return root_; }

 private:
  std::shared_ptr<const detail::Node> root_;
  int dim_ = 0;
};

// Throws ParseError (syntax, unknown identifier, coordinate index out of range).
ScalarExpr parse(std::string_view text, int dim, const ParamMap& params = {},
                 const BindingMap& bindings = {});

inline Jet2 eval_jet2(const ScalarExpr& e, std::span<const double> point) { return e.eval_jet2(point); }

// Jet helpers shared with code that composes jets outside an expression tree.
Jet2 jet_apply(UnaryFn fn, const Jet2& u, const std::string& where = "<jet>");
Jet2 jet_pow(const Jet2& base, const Jet2& exponent, bool exponent_constant,
             const std::string& where = "<jet>");

}  // namespace slantgeo
