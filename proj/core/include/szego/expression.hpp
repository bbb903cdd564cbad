#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "szego/jet.hpp"

namespace szego {

/// Reduced fraction with a positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  [[nodiscard]] bool is_integer() const noexcept { return den == 1; }
  [[nodiscard]] double to_double() const noexcept {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational operator-(const Rational& a, const Rational& b);

/// Immutable expression tree over the moduli variables m0..m{var_count-1}.
///
/// Copies share nodes, so expressions are cheap to pass by value and safe to
/// evaluate from several threads at once.
class Expression {
 public:
  enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Neg, Pow, Sqrt, Exp, Log };

  struct Node;

  static Expression constant(double value, std::size_t var_count);
  static Expression variable(std::size_t index, std::size_t var_count);

  [[nodiscard]] Kind kind() const noexcept;
  [[nodiscard]] std::size_t var_count() const noexcept { return var_count_; }
  [[nodiscard]] bool is_constant() const noexcept { return kind() == Kind::Constant; }

  /// Constant value; only meaningful for Kind::Constant.
  [[nodiscard]] double constant_value() const noexcept;
  /// Variable index; only meaningful for Kind::Variable.
  [[nodiscard]] std::size_t variable_index() const noexcept;
  /// Exponent; only meaningful for Kind::Pow.
  [[nodiscard]] Rational exponent() const noexcept;
  /// Operands: lhs() for unary nodes and the base of Pow, rhs() for binary.
  [[nodiscard]] Expression lhs() const;
  [[nodiscard]] Expression rhs() const;

  /// Same tree shape (used by round-trip tests).
  [[nodiscard]] bool structurally_equal(const Expression& other) const;

  [[nodiscard]] const std::shared_ptr<const Node>& node() const noexcept { return node_; }

  /// Wraps an existing node; used by the parser and the builders.
  Expression(std::shared_ptr<const Node> node, std::size_t var_count)
      : node_(std::move(node)), var_count_(var_count) {}

 private:
  std::shared_ptr<const Node> node_;
  std::size_t var_count_ = 0;
};

struct Expression::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::size_t index = 0;
  Rational exponent;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

// Builders with constant folding. No other simplification is attempted.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow(const Expression& base, Rational exponent);
Expression sqrt(const Expression& a);
Expression exp(const Expression& a);
Expression log(const Expression& a);

/// Parses `text` in the moduli expression grammar:
///
///   expr     := term (("+"|"-") term)*
///   term     := factor (("*"|"/") factor)*
///   factor   := "-" factor | base ("^" exponent)?
///   base     := number | var | "(" expr ")" | func "(" expr ")"
///   var      := "m" digits
///   func     := "sqrt" | "exp" | "log"
///   exponent := signed-integer | "(" signed-integer "/" positive-integer ")"
///
/// Throws ParseError carrying the byte offset of the first bad token.
Expression parse_expression(std::string_view text, std::size_t var_count);

/// Prints in the same grammar with minimal parentheses; parse(to_string(e))
/// reproduces e exactly.
std::string to_string(const Expression& expr);

/// Double-precision evaluation. Throws DomainError naming the offending node.
double evaluate(const Expression& expr, std::span<const double> moduli);

/// Symbolic partial derivative with respect to m_var.
Expression differentiate(const Expression& expr, std::size_t var);

/// Value, gradient and Hessian with respect to all moduli at `moduli`.
JetValue eval_jet2(const Expression& expr, std::span<const double> moduli);

/// Evaluates `expr` with each variable m_i replaced by the jet `args[i]`;
/// composes a function of the moduli with an inner jet-valued map.
JetValue eval_jet2(const Expression& expr, std::span<const JetValue> args);

struct HomogeneityViolation {
  std::vector<double> point;
  double scale = 0.0;
  double scaled_value = 0.0;
  double expected_value = 0.0;
};

struct HomogeneityReport {
  bool passed = true;
  double worst_relative_error = 0.0;
  std::optional<HomogeneityViolation> first_violation;
  std::string message;
};

/// Checks expr(t m) = t^order expr(m) at `samples` seeded random strictly
/// positive points and t in {0.5, 2, 3}.
HomogeneityReport check_homogeneity(const Expression& expr, double order, int samples,
                                    double tol);

}  // namespace szego
