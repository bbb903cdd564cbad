#include "szego/expression.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "szego/errors.hpp"

namespace szego {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Kind = Expression::Kind;

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw Error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n, d);
  num = g == 0 ? 0 : n / g;
  den = g == 0 ? 1 : d / g;
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
}

namespace {

NodePtr make_node(Kind kind, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = v;
  return n;
}

NodePtr make_variable(std::size_t i) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->index = i;
  return n;
}

NodePtr make_pow(NodePtr base, Rational r) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->a = std::move(base);
  n->exponent = r;
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->kind == Kind::Constant; }

std::size_t joint_vars(const Expression& a, const Expression& b) {
  return std::max(a.var_count(), b.var_count());
}

// ---------------------------------------------------------------- printing

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
    case Kind::Div:
      return 2;
    case Kind::Neg:
      return 3;
    case Kind::Constant:
      return n.value < 0.0 || std::signbit(n.value) ? 3 : 5;
    case Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void print(const Node& n, std::string& out);

void print_child(const Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Constant:
      out += format_number(n.value);
      return;
    case Kind::Variable:
      out += 'm';
      out += std::to_string(n.index);
      return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      const int p = precedence(n);
      print_child(*n.a, p, out);
      out += n.kind == Kind::Add ? " + " : n.kind == Kind::Sub ? " - " : n.kind == Kind::Mul ? " * " : " / ";
      // left associative: an equal-precedence right operand needs parentheses
      print_child(*n.b, p + 1, out);
      return;
    }
    case Kind::Neg:
      out += '-';
      print_child(*n.a, 3, out);
      return;
    case Kind::Pow: {
      print_child(*n.a, 5, out);
      out += '^';
      if (n.exponent.is_integer()) {
        out += std::to_string(n.exponent.num);
      } else {
        out += '(' + std::to_string(n.exponent.num) + '/' + std::to_string(n.exponent.den) + ')';
      }
      return;
    }
    case Kind::Sqrt:
    case Kind::Exp:
    case Kind::Log:
      out += n.kind == Kind::Sqrt ? "sqrt(" : n.kind == Kind::Exp ? "exp(" : "log(";
      print(*n.a, out);
      out += ')';
      return;
  }
}

std::string node_string(const Node& n) {
  std::string s;
  print(n, s);
  return s;
}

// ----------------------------------------------------------------- parsing

class Parser {
 public:
  Parser(std::string_view text, std::size_t vars) : text_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Kind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(Kind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Kind::Mul, lhs, factor());
      } else if (accept('/')) {
        lhs = make_node(Kind::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    if (accept('-')) {
      NodePtr inner = factor();
      if (inner->kind == Kind::Constant) return make_constant(-inner->value);
      return make_node(Kind::Neg, inner);
    }
    NodePtr b = base();
    if (accept('^')) return make_pow(b, exponent());
    return b;
  }

  std::int64_t integer(bool allow_sign) {
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (allow_sign && pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      fail("expected integer");
    }
    std::int64_t v = 0;
    auto res = std::from_chars(text_.data() + digits, text_.data() + pos_, v);
    if (res.ec != std::errc{}) {
      pos_ = digits;
      fail("integer out of range");
    }
    return negative ? -v : v;
  }

  Rational exponent() {
    if (accept('(')) {
      const std::int64_t num = integer(true);
      expect('/');
      skip_ws();
      const std::size_t den_pos = pos_;
      const std::int64_t den = integer(false);
      if (den == 0) {
        pos_ = den_pos;
        fail("zero denominator in exponent");
      }
      expect(')');
      return Rational(num, den);
    }
    return Rational(integer(true), 1);
  }

  NodePtr base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == 'm' && pos_ + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      const std::size_t start = pos_;
      ++pos_;
      const std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::size_t index = 0;
      auto res = std::from_chars(text_.data() + digits, text_.data() + pos_, index);
      if (res.ec != std::errc{} || index >= vars_) {
        pos_ = start;
        fail("variable index out of range (declared " + std::to_string(vars_) + " variables)");
      }
      return make_variable(index);
    }
    for (const auto& [name, kind] : {std::pair{"sqrt", Kind::Sqrt}, std::pair{"exp", Kind::Exp},
                                     std::pair{"log", Kind::Log}}) {
      const std::string_view fn(name);
      if (text_.substr(pos_, fn.size()) == fn) {
        pos_ += fn.size();
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make_node(kind, arg);
      }
    }
    fail("unexpected character");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail("malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = mark;  // not an exponent after all
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc{} || res.ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return make_constant(v);
  }

  std::string_view text_;
  std::size_t vars_;
  std::size_t pos_ = 0;
};

// -------------------------------------------------------------- evaluation

double value_of(double v) { return v; }
double value_of(const JetValue& v) { return v.value(); }

double pow_value(double x, double r) { return std::pow(x, r); }
JetValue pow_value(const JetValue& x, double r) { return pow(x, r); }

template <class T>
struct Evaluator {
  std::span<const T> vars;
  std::size_t var_count;
  bool need_derivatives;

  [[noreturn]] void domain(const Node& n, const std::string& what) const {
    throw DomainError(what, node_string(n));
  }

  T constant(double c) const {
    if constexpr (std::is_same_v<T, double>) {
      return c;
    } else {
      return JetValue(c, var_count);
    }
  }

  T operator()(const Node& n) const {
    switch (n.kind) {
      case Kind::Constant:
        return constant(n.value);
      case Kind::Variable:
        if (n.index >= vars.size()) domain(n, "variable outside the evaluation point");
        return vars[n.index];
      case Kind::Add:
        return (*this)(*n.a) + (*this)(*n.b);
      case Kind::Sub:
        return (*this)(*n.a) - (*this)(*n.b);
      case Kind::Mul:
        return (*this)(*n.a) * (*this)(*n.b);
      case Kind::Div: {
        T den = (*this)(*n.b);
        if (value_of(den) == 0.0) domain(n, "division by zero");
        return (*this)(*n.a) / den;
      }
      case Kind::Neg:
        return -(*this)(*n.a);
      case Kind::Pow: {
        T b = (*this)(*n.a);
        const double x = value_of(b);
        const Rational r = n.exponent;
        if (!r.is_integer() && x < 0.0) domain(n, "fractional power of a negative value");
        if (x == 0.0 && r.num < 0) domain(n, "negative power of zero");
        if (need_derivatives && x == 0.0 && !r.is_integer() && r.to_double() < 2.0) {
          domain(n, "power not twice differentiable at zero");
        }
        return pow_value(b, r.to_double());
      }
      case Kind::Sqrt: {
        T a = (*this)(*n.a);
        const double x = value_of(a);
        if (x < 0.0) domain(n, "square root of a negative value");
        if (need_derivatives && x == 0.0) domain(n, "square root not differentiable at zero");
        using std::sqrt;
        return sqrt(a);
      }
      case Kind::Exp: {
        using std::exp;
        return exp((*this)(*n.a));
      }
      case Kind::Log: {
        T a = (*this)(*n.a);
        if (value_of(a) <= 0.0) domain(n, "logarithm of a nonpositive value");
        using std::log;
        return log(a);
      }
    }
    domain(n, "unknown node");
  }
};

// ----------------------------------------------------------- differentiation

NodePtr derive(const NodePtr& n, std::size_t var, std::size_t vars);

Expression wrap(const NodePtr& n, std::size_t vars) { return Expression(n, vars); }

NodePtr derive(const NodePtr& n, std::size_t var, std::size_t vars) {
  const auto w = [&](const NodePtr& p) { return wrap(p, vars); };
  const Expression zero = Expression::constant(0.0, vars);
  const Expression one = Expression::constant(1.0, vars);
  switch (n->kind) {
    case Kind::Constant:
      return zero.node();
    case Kind::Variable:
      return n->index == var ? one.node() : zero.node();
    case Kind::Add:
      return (w(derive(n->a, var, vars)) + w(derive(n->b, var, vars))).node();
    case Kind::Sub:
      return (w(derive(n->a, var, vars)) - w(derive(n->b, var, vars))).node();
    case Kind::Mul: {
      const Expression a = w(n->a), b = w(n->b);
      return (w(derive(n->a, var, vars)) * b + a * w(derive(n->b, var, vars))).node();
    }
    case Kind::Div: {
      const Expression a = w(n->a), b = w(n->b);
      const Expression da = w(derive(n->a, var, vars)), db = w(derive(n->b, var, vars));
      return ((da * b - a * db) / pow(b, Rational(2))).node();
    }
    case Kind::Neg:
      return (-w(derive(n->a, var, vars))).node();
    case Kind::Pow: {
      const Rational r = n->exponent;
      const Expression coeff = Expression::constant(r.to_double(), vars);
      return (coeff * pow(w(n->a), r - Rational(1)) * w(derive(n->a, var, vars))).node();
    }
    case Kind::Sqrt:
      return (w(derive(n->a, var, vars)) / (Expression::constant(2.0, vars) * w(n))).node();
    case Kind::Exp:
      return (w(n) * w(derive(n->a, var, vars))).node();
    case Kind::Log:
      return (w(derive(n->a, var, vars)) / w(n->a)).node();
  }
  return zero.node();
}

bool same(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Constant:
      return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
    case Kind::Variable:
      return a.index == b.index;
    case Kind::Pow:
      return a.exponent == b.exponent && same(*a.a, *b.a);
    case Kind::Neg:
    case Kind::Sqrt:
    case Kind::Exp:
    case Kind::Log:
      return same(*a.a, *b.a);
    default:
      return same(*a.a, *b.a) && same(*a.b, *b.b);
  }
}

}  // namespace

// ------------------------------------------------------------------ builders

Expression Expression::constant(double value, std::size_t var_count) {
  return Expression(make_constant(value), var_count);
}

Expression Expression::variable(std::size_t index, std::size_t var_count) {
  if (index >= var_count) throw Error("variable index out of range");
  return Expression(make_variable(index), var_count);
}

Expression::Kind Expression::kind() const noexcept { return node_->kind; }
double Expression::constant_value() const noexcept { return node_->value; }
std::size_t Expression::variable_index() const noexcept { return node_->index; }
Rational Expression::exponent() const noexcept { return node_->exponent; }
Expression Expression::lhs() const { return Expression(node_->a, var_count_); }
Expression Expression::rhs() const { return Expression(node_->b, var_count_); }

bool Expression::structurally_equal(const Expression& other) const {
  return same(*node_, *other.node_);
}

Expression operator+(const Expression& a, const Expression& b) {
  const std::size_t v = joint_vars(a, b);
  if (is_const(a.node()) && is_const(b.node())) {
    return Expression::constant(a.constant_value() + b.constant_value(), v);
  }
  if (is_const(a.node(), 0.0)) return Expression(b.node(), v);
  if (is_const(b.node(), 0.0)) return Expression(a.node(), v);
  return Expression(make_node(Kind::Add, a.node(), b.node()), v);
}

Expression operator-(const Expression& a, const Expression& b) {
  const std::size_t v = joint_vars(a, b);
  if (is_const(a.node()) && is_const(b.node())) {
    return Expression::constant(a.constant_value() - b.constant_value(), v);
  }
  if (is_const(b.node(), 0.0)) return Expression(a.node(), v);
  if (is_const(a.node(), 0.0)) return -Expression(b.node(), v);
  return Expression(make_node(Kind::Sub, a.node(), b.node()), v);
}

Expression operator*(const Expression& a, const Expression& b) {
  const std::size_t v = joint_vars(a, b);
  if (is_const(a.node()) && is_const(b.node())) {
    return Expression::constant(a.constant_value() * b.constant_value(), v);
  }
  if (is_const(a.node(), 0.0) || is_const(b.node(), 0.0)) return Expression::constant(0.0, v);
  if (is_const(a.node(), 1.0)) return Expression(b.node(), v);
  if (is_const(b.node(), 1.0)) return Expression(a.node(), v);
  // c1 * (c2 * x) -> (c1 c2) * x
  if (is_const(a.node()) && b.kind() == Kind::Mul && is_const(b.node()->a)) {
    return Expression::constant(a.constant_value() * b.node()->a->value, v) *
           Expression(b.node()->b, v);
  }
  if (is_const(b.node()) && !is_const(a.node())) return b * a;
  return Expression(make_node(Kind::Mul, a.node(), b.node()), v);
}

Expression operator/(const Expression& a, const Expression& b) {
  const std::size_t v = joint_vars(a, b);
  if (is_const(a.node()) && is_const(b.node()) && b.constant_value() != 0.0) {
    return Expression::constant(a.constant_value() / b.constant_value(), v);
  }
  if (is_const(a.node(), 0.0) && !is_const(b.node(), 0.0)) return Expression::constant(0.0, v);
  if (is_const(b.node(), 1.0)) return Expression(a.node(), v);
  return Expression(make_node(Kind::Div, a.node(), b.node()), v);
}

Expression operator-(const Expression& a) {
  if (a.is_constant()) return Expression::constant(-a.constant_value(), a.var_count());
  if (a.kind() == Kind::Neg) return a.lhs();
  return Expression(make_node(Kind::Neg, a.node()), a.var_count());
}

Expression pow(const Expression& base, Rational exponent) {
  const std::size_t v = base.var_count();
  if (exponent.num == 0) return Expression::constant(1.0, v);
  if (exponent == Rational(1)) return base;
  if (base.is_constant()) {
    const double x = base.constant_value();
    const bool ok = (exponent.is_integer() || x > 0.0) && (x != 0.0 || exponent.num > 0);
    if (ok) return Expression::constant(std::pow(x, exponent.to_double()), v);
  }
  return Expression(make_pow(base.node(), exponent), v);
}

Expression sqrt(const Expression& a) {
  if (a.is_constant() && a.constant_value() >= 0.0) {
    return Expression::constant(std::sqrt(a.constant_value()), a.var_count());
  }
  return Expression(make_node(Kind::Sqrt, a.node()), a.var_count());
}

Expression exp(const Expression& a) {
  if (a.is_constant()) return Expression::constant(std::exp(a.constant_value()), a.var_count());
  return Expression(make_node(Kind::Exp, a.node()), a.var_count());
}

Expression log(const Expression& a) {
  if (a.is_constant() && a.constant_value() > 0.0) {
    return Expression::constant(std::log(a.constant_value()), a.var_count());
  }
  return Expression(make_node(Kind::Log, a.node()), a.var_count());
}

// --------------------------------------------------------------- operations

Expression parse_expression(std::string_view text, std::size_t var_count) {
  return Expression(Parser(text, var_count).parse(), var_count);
}

std::string to_string(const Expression& expr) { return node_string(*expr.node()); }

double evaluate(const Expression& expr, std::span<const double> moduli) {
  if (moduli.size() != expr.var_count()) {
    throw Error("evaluation point has " + std::to_string(moduli.size()) +
                " coordinates, expression declares " + std::to_string(expr.var_count()));
  }
  return Evaluator<double>{moduli, expr.var_count(), false}(*expr.node());
}

Expression differentiate(const Expression& expr, std::size_t var) {
  if (var >= expr.var_count()) throw Error("differentiation variable out of range");
  return Expression(derive(expr.node(), var, expr.var_count()), expr.var_count());
}

JetValue eval_jet2(const Expression& expr, std::span<const double> moduli) {
  if (moduli.size() != expr.var_count()) throw Error("evaluation point dimension mismatch");
  std::vector<JetValue> seeds;
  seeds.reserve(moduli.size());
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    seeds.push_back(JetValue::variable(moduli[i], i, moduli.size()));
  }
  return eval_jet2(expr, std::span<const JetValue>(seeds));
}

JetValue eval_jet2(const Expression& expr, std::span<const JetValue> args) {
  if (args.size() != expr.var_count()) throw Error("jet argument count mismatch");
  const std::size_t jet_vars = args.empty() ? 0 : args.front().size();
  return Evaluator<JetValue>{args, jet_vars, true}(*expr.node());
}

HomogeneityReport check_homogeneity(const Expression& expr, double order, int samples,
                                    double tol) {
  if (samples < 1) throw Error("check_homogeneity needs at least one sample");
  HomogeneityReport report;
  std::mt19937_64 rng(0x5eed'2024'0001ULL);
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  const std::size_t nv = expr.var_count();
  std::vector<double> m(nv), tm(nv);
  for (int s = 0; s < samples; ++s) {
    for (auto& v : m) v = dist(rng);
    for (double t : {0.5, 2.0, 3.0}) {
      for (std::size_t i = 0; i < nv; ++i) tm[i] = t * m[i];
      double base = 0.0;
      double scaled = 0.0;
      try {
        base = evaluate(expr, m);
        scaled = evaluate(expr, tm);
      } catch (const DomainError& e) {
        report.passed = false;
        report.message = e.what();
        report.first_violation = HomogeneityViolation{m, t, NAN, NAN};
        return report;
      }
      const double expected = std::pow(t, order) * base;
      const double err = std::abs(scaled - expected);
      const double rel = expected != 0.0 ? err / std::abs(expected) : err;
      report.worst_relative_error = std::max(report.worst_relative_error, rel);
      if (!(err <= tol * std::abs(expected)) && report.passed) {
        report.passed = false;
        report.first_violation = HomogeneityViolation{m, t, scaled, expected};
        std::ostringstream os;
        os << "f(" << t << "*m) = " << scaled << " but " << t << "^" << order
           << "*f(m) = " << expected;
        report.message = os.str();
      }
    }
  }
  return report;
}

}  // namespace szego
