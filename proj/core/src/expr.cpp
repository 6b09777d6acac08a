#include "slantgeo/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>

#include "slantgeo/errors.hpp"

namespace slantgeo {

namespace detail {

struct Node {
  enum class Kind { number, coordinate, param, unary, binary };
  Kind kind = Kind::number;
  double value = 0.0;  // number / param value
  int index = 0;       // coordinate, 0-based
  std::string name;    // param name
  UnaryFn fn = UnaryFn::neg;
  BinaryOp op = BinaryOp::add;
  std::shared_ptr<const Node> a, b;
  bool constant = true;  // no coordinate dependence
};

}  // namespace detail

using detail::Node;
using NodePtr = std::shared_ptr<const Node>;

namespace {

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::number;
  n->value = v;
  return n;
}

NodePtr make_coordinate(int index) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::coordinate;
  n->index = index;
  n->constant = false;
  return n;
}

NodePtr make_param(std::string name, double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::param;
  n->name = std::move(name);
  n->value = v;
  return n;
}

NodePtr make_unary(UnaryFn fn, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::unary;
  n->fn = fn;
  n->constant = a->constant;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::binary;
  n->op = op;
  n->constant = a->constant && b->constant;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

constexpr std::array<std::pair<std::string_view, UnaryFn>, 8> kFunctions{{
    {"sin", UnaryFn::sin},
    {"cos", UnaryFn::cos},
    {"tan", UnaryFn::tan},
    {"sinh", UnaryFn::sinh},
    {"cosh", UnaryFn::cosh},
    {"exp", UnaryFn::exp},
    {"ln", UnaryFn::ln},
    {"sqrt", UnaryFn::sqrt},
}};

std::optional<UnaryFn> lookup_function(std::string_view name) {
  for (const auto& [n, fn] : kFunctions) {
    if (n == name) return fn;
  }
  return std::nullopt;
}

std::string_view function_name(UnaryFn fn) {
  for (const auto& [n, f] : kFunctions) {
    if (f == fn) return n;
  }
  return "neg";
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string node_text(const Node& n) {
  switch (n.kind) {
    case Node::Kind::number:
      return n.value < 0 || std::signbit(n.value) ? "(-" + format_double(-n.value) + ")"
                                                   : format_double(n.value);
    case Node::Kind::coordinate:
      return "x" + std::to_string(n.index + 1);
    case Node::Kind::param:
      return n.name;
    case Node::Kind::unary:
      if (n.fn == UnaryFn::neg) return "(-" + node_text(*n.a) + ")";
      return std::string(function_name(n.fn)) + "(" + node_text(*n.a) + ")";
    case Node::Kind::binary: {
      const char* op = " + ";
      switch (n.op) {
        case BinaryOp::add: op = " + "; break;
        case BinaryOp::sub: op = " - "; break;
        case BinaryOp::mul: op = " * "; break;
        case BinaryOp::div: op = " / "; break;
        case BinaryOp::pow: op = "^"; break;
      }
      return "(" + node_text(*n.a) + op + node_text(*n.b) + ")";
    }
  }
  return {};
}

// Lazily rendered location for domain errors; rendering the subtree text on
// every evaluation would dominate the cost of small expressions.
struct Where {
  const Node* node = nullptr;
  const std::string* text = nullptr;
  std::string str() const { return node ? node_text(*node) : (text ? *text : std::string("<jet>")); }
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view text, int dim, const ParamMap& params, const BindingMap& bindings,
         std::set<std::string, std::less<>> active)
      : text_(text), dim_(dim), params_(params), bindings_(bindings), active_(std::move(active)) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail_unexpected();
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
                                   text_[pos_] == '\n')) {
      ++pos_;
    }
  }

  // Accepts ASCII '-' and U+2212 MINUS SIGN.
  bool peek_minus(std::size_t* width) const {
    if (pos_ < text_.size() && text_[pos_] == '-') {
      *width = 1;
      return true;
    }
    if (text_.substr(pos_, 3) == "\xE2\x88\x92") {
      *width = 3;
      return true;
    }
    return false;
  }

  bool peek_char(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

  [[noreturn]] void fail_unexpected() const {
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    throw ParseError(std::string("unexpected token '") + text_[pos_] + "'", pos_);
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip_ws();
      std::size_t w = 0;
      if (peek_char('+')) {
        ++pos_;
        lhs = make_binary(BinaryOp::add, lhs, term());
      } else if (peek_minus(&w)) {
        pos_ += w;
        lhs = make_binary(BinaryOp::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      skip_ws();
      if (peek_char('*')) {
        ++pos_;
        lhs = make_binary(BinaryOp::mul, lhs, factor());
      } else if (peek_char('/')) {
        ++pos_;
        lhs = make_binary(BinaryOp::div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    skip_ws();
    std::size_t w = 0;
    if (peek_minus(&w)) {
      pos_ += w;
      return make_unary(UnaryFn::neg, power());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    skip_ws();
    if (peek_char('^')) {
      ++pos_;
      return make_binary(BinaryOp::pow, base, factor());
    }
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail_unexpected();
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      skip_ws();
      if (!peek_char(')')) {
        if (pos_ >= text_.size()) throw ParseError("missing ')'", pos_);
        fail_unexpected();
      }
      ++pos_;
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail_unexpected();
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
        pos_ = p;
      }
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    return make_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_ws();
    const bool call = peek_char('(');

    if (auto fn = lookup_function(name)) {
      if (!call) throw ParseError("expected '(' after function '" + std::string(name) + "'", pos_);
      ++pos_;
      NodePtr arg = expr();
      skip_ws();
      if (!peek_char(')')) {
        if (pos_ >= text_.size()) throw ParseError("missing ')'", pos_);
        fail_unexpected();
      }
      ++pos_;
      return make_unary(*fn, arg);
    }
    if (call) throw ParseError("unknown function '" + std::string(name) + "'", start);

    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string_view::npos) {
      int k = 0;
      auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
      if (ec != std::errc() || k < 1 || k > dim_) {
        throw ParseError("coordinate '" + std::string(name) + "' out of range for dimension " +
                             std::to_string(dim_),
                         start);
      }
      return make_coordinate(k - 1);
    }
    if (auto it = bindings_.find(name); it != bindings_.end()) {
      if (active_.contains(name)) {
        throw ParseError("recursive binding '" + std::string(name) + "'", start);
      }
      auto nested = active_;
      nested.insert(std::string(name));
      try {
        return Parser(it->second, dim_, params_, bindings_, std::move(nested)).parse_all();
      } catch (const ParseError& e) {
        throw ParseError("in binding '" + std::string(name) + "': " + e.what(), start);
      }
    }
    if (auto it = params_.find(name); it != params_.end()) {
      return make_param(std::string(name), it->second);
    }
    if (name == "pi") return make_param("pi", std::numbers::pi);
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int dim_;
  const ParamMap& params_;
  const BindingMap& bindings_;
  std::set<std::string, std::less<>> active_;
};

// ---------------------------------------------------------------------------
// Evaluation

void require_finite(double v, const Node& n) {
  if (!std::isfinite(v)) throw DomainError("non-finite result", node_text(n));
}

bool is_integer(double c) { return std::isfinite(c) && std::floor(c) == c && std::fabs(c) < 9.0e15; }

double apply_value(UnaryFn fn, double u, const Where& where) {
  switch (fn) {
    case UnaryFn::neg: return -u;
    case UnaryFn::sin: return std::sin(u);
    case UnaryFn::cos: return std::cos(u);
    case UnaryFn::tan:
      if (std::cos(u) == 0.0) throw DomainError("tan at a pole", where.str());
      return std::tan(u);
    case UnaryFn::sinh: return std::sinh(u);
    case UnaryFn::cosh: return std::cosh(u);
    case UnaryFn::exp: return std::exp(u);
    case UnaryFn::ln:
      if (!(u > 0.0)) throw DomainError("ln of non-positive value", where.str());
      return std::log(u);
    case UnaryFn::sqrt:
      if (!(u > 0.0)) throw DomainError("sqrt of non-positive value", where.str());
      return std::sqrt(u);
  }
  return u;
}

double pow_value(double base, double exponent, bool exponent_constant, const Where& where) {
  if (exponent_constant && is_integer(exponent)) {
    if (base == 0.0 && exponent < 0.0) throw DomainError("division by zero in power", where.str());
    return std::pow(base, exponent);
  }
  if (!(base > 0.0)) throw DomainError("non-positive base with non-integer exponent", where.str());
  return std::pow(base, exponent);
}

double eval_node(const Node& n, std::span<const double> x) {
  switch (n.kind) {
    case Node::Kind::number:
    case Node::Kind::param:
      return n.value;
    case Node::Kind::coordinate:
      return x[static_cast<std::size_t>(n.index)];
    case Node::Kind::unary: {
      const double u = eval_node(*n.a, x);
      const double r = apply_value(n.fn, u, Where{&n});
      require_finite(r, n);
      return r;
    }
    case Node::Kind::binary: {
      const double a = eval_node(*n.a, x);
      const double b = eval_node(*n.b, x);
      double r = 0.0;
      switch (n.op) {
        case BinaryOp::add: r = a + b; break;
        case BinaryOp::sub: r = a - b; break;
        case BinaryOp::mul: r = a * b; break;
        case BinaryOp::div:
          if (b == 0.0) throw DomainError("division by zero", node_text(n));
          r = a / b;
          break;
        case BinaryOp::pow: r = pow_value(a, b, n.b->constant, Where{&n}); break;
      }
      require_finite(r, n);
      return r;
    }
  }
  return 0.0;
}

Jet2 jet_apply_at(UnaryFn fn, const Jet2& u, const Where& where);
Jet2 jet_pow_at(const Jet2& base, const Jet2& exponent, bool exponent_constant, const Where& where);

Jet2 jet_node(const Node& n, std::span<const double> x, int dim) {
  switch (n.kind) {
    case Node::Kind::number:
    case Node::Kind::param:
      return Jet2::constant(n.value, dim);
    case Node::Kind::coordinate:
      return Jet2::variable(x[static_cast<std::size_t>(n.index)], n.index, dim);
    case Node::Kind::unary: {
      Jet2 u = jet_node(*n.a, x, dim);
      if (n.fn == UnaryFn::neg) return -u;
      return jet_apply_at(n.fn, u, Where{&n});
    }
    case Node::Kind::binary: {
      Jet2 a = jet_node(*n.a, x, dim);
      Jet2 b = jet_node(*n.b, x, dim);
      Jet2 r;
      switch (n.op) {
        case BinaryOp::add: r = a + b; break;
        case BinaryOp::sub: r = a - b; break;
        case BinaryOp::mul: r = a * b; break;
        case BinaryOp::div:
          if (b.value == 0.0) throw DomainError("division by zero", node_text(n));
          r = a / b;
          break;
        case BinaryOp::pow: r = jet_pow_at(a, b, n.b->constant, Where{&n}); break;
      }
      require_finite(r.value, n);
      return r;
    }
  }
  return {};
}

Jet2 jet_apply_at(UnaryFn fn, const Jet2& u, const Where& where) {
  const double v = u.value;
  Jet2 r;
  switch (fn) {
    case UnaryFn::neg: return -u;
    case UnaryFn::sin: r = chain(u, std::sin(v), std::cos(v), -std::sin(v)); break;
    case UnaryFn::cos: r = chain(u, std::cos(v), -std::sin(v), -std::cos(v)); break;
    case UnaryFn::tan: {
      const double t = apply_value(fn, v, where);
      const double sec2 = 1.0 + t * t;
      r = chain(u, t, sec2, 2.0 * t * sec2);
      break;
    }
    case UnaryFn::sinh: r = chain(u, std::sinh(v), std::cosh(v), std::sinh(v)); break;
    case UnaryFn::cosh: r = chain(u, std::cosh(v), std::sinh(v), std::cosh(v)); break;
    case UnaryFn::exp: {
      const double e = std::exp(v);
      r = chain(u, e, e, e);
      break;
    }
    case UnaryFn::ln: {
      const double l = apply_value(fn, v, where);
      r = chain(u, l, 1.0 / v, -1.0 / (v * v));
      break;
    }
    case UnaryFn::sqrt: {
      const double s = apply_value(fn, v, where);
      r = chain(u, s, 0.5 / s, -0.25 / (s * v));
      break;
    }
  }
  if (!std::isfinite(r.value)) throw DomainError("non-finite result", where.str());
  return r;
}

Jet2 jet_pow_at(const Jet2& base, const Jet2& exponent, bool exponent_constant, const Where& where) {
  if (exponent_constant) {
    const double c = exponent.value;
    const double f = base.value;
    const double value = pow_value(f, c, true, where);
    double d1 = 0.0;
    double d2 = 0.0;
    if (c == 0.0) {
      // f^0 == 1
    } else if (c == 1.0) {
      d1 = 1.0;
    } else {
      if (!is_integer(c) && !(f > 0.0)) throw DomainError("non-positive base with non-integer exponent", where.str());
      d1 = c * std::pow(f, c - 1.0);
      d2 = (c == 2.0) ? 2.0 : c * (c - 1.0) * std::pow(f, c - 2.0);
    }
    return chain(base, value, d1, d2);
  }
  if (!(base.value > 0.0)) throw DomainError("non-positive base with variable exponent", where.str());
  return jet_apply_at(UnaryFn::exp, exponent * jet_apply_at(UnaryFn::ln, base, where), where);
}

}  // namespace

Jet2 jet_apply(UnaryFn fn, const Jet2& u, const std::string& where) { return jet_apply_at(fn, u, Where{nullptr, &where}); }

Jet2 jet_pow(const Jet2& base, const Jet2& exponent, bool exponent_constant, const std::string& where) {
  return jet_pow_at(base, exponent, exponent_constant, Where{nullptr, &where});
}

ScalarExpr ScalarExpr::constant(double value, int dim) { return ScalarExpr(make_number(value), dim); }

ScalarExpr ScalarExpr::coordinate(int index, int dim) {
  if (index < 0 || index >= dim) throw Error("coordinate index out of range");
  return ScalarExpr(make_coordinate(index), dim);
}

bool ScalarExpr::is_constant() const { return root_ == nullptr || root_->constant; }

double ScalarExpr::eval(std::span<const double> point) const {
  if (!root_) throw Error("evaluating an empty expression");
  if (static_cast<int>(point.size()) != dim_) throw Error("point dimension does not match expression chart");
  return eval_node(*root_, point);
}

Jet2 ScalarExpr::eval_jet2(std::span<const double> point) const {
  if (!root_) throw Error("evaluating an empty expression");
  if (static_cast<int>(point.size()) != dim_) throw Error("point dimension does not match expression chart");
  return jet_node(*root_, point, dim_);
}

std::string ScalarExpr::to_string() const { return root_ ? node_text(*root_) : std::string(); }

namespace {
int common_dim(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.empty() || b.empty()) throw Error("operation on an empty expression");
  if (a.dim() != b.dim()) throw Error("combining expressions from charts of different dimension");
  return a.dim();
}
}  // namespace

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_binary(BinaryOp::add, a.root(), b.root()), common_dim(a, b));
}
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_binary(BinaryOp::sub, a.root(), b.root()), common_dim(a, b));
}
ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_binary(BinaryOp::mul, a.root(), b.root()), common_dim(a, b));
}
ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
  return ScalarExpr(make_binary(BinaryOp::div, a.root(), b.root()), common_dim(a, b));
}
ScalarExpr operator-(const ScalarExpr& a) {
  if (a.empty()) throw Error("operation on an empty expression");
  return ScalarExpr(make_unary(UnaryFn::neg, a.root()), a.dim());
}

ScalarExpr parse(std::string_view text, int dim, const ParamMap& params, const BindingMap& bindings) {
  if (dim <= 0) throw Error("chart dimension must be positive");
  return ScalarExpr(Parser(text, dim, params, bindings, {}).parse_all(), dim);
}

}  // namespace slantgeo
