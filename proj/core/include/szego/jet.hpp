#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace szego {

/// Value, gradient and Hessian of a scalar function of `size()` variables.
///
/// The Hessian is stored once per unordered pair (packed upper triangle), so
/// it is symmetric by construction. Arithmetic propagates all three parts
/// exactly through the chain rule; nothing is approximated.
class JetValue {
 public:
  JetValue() = default;
  /// Constant jet: zero gradient and Hessian.
  JetValue(double value, std::size_t vars);

  /// Jet of the coordinate function x_index evaluated at `value`.
  static JetValue variable(double value, std::size_t index, std::size_t vars);

  [[nodiscard]] std::size_t size() const noexcept { return grad_.size(); }
  [[nodiscard]] double value() const noexcept { return value_; }
  [[nodiscard]] double grad(std::size_t i) const { return grad_[i]; }
  [[nodiscard]] double hess(std::size_t i, std::size_t j) const { return hess_[packed(i, j)]; }
  [[nodiscard]] std::span<const double> gradient() const noexcept { return grad_; }

  void set_value(double v) noexcept { value_ = v; }
  void set_grad(std::size_t i, double g) { grad_[i] = g; }
  void set_hess(std::size_t i, std::size_t j, double h) { hess_[packed(i, j)] = h; }

  /// f(g) for a scalar f with f(v)=f0, f'(v)=f1, f''(v)=f2.
  [[nodiscard]] JetValue compose(double f0, double f1, double f2) const;

  JetValue& operator+=(const JetValue& rhs);
  JetValue& operator-=(const JetValue& rhs);
  JetValue& operator*=(const JetValue& rhs);
  JetValue& operator/=(const JetValue& rhs);
  JetValue& operator*=(double s);

 private:
  [[nodiscard]] std::size_t packed(std::size_t i, std::size_t j) const noexcept {
    if (i > j) std::swap(i, j);
    // row-major upper triangle
    return i * size() - i * (i + 1) / 2 + j;
  }

  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

JetValue operator+(JetValue a, const JetValue& b);
JetValue operator-(JetValue a, const JetValue& b);
JetValue operator*(JetValue a, const JetValue& b);
JetValue operator/(JetValue a, const JetValue& b);
JetValue operator*(JetValue a, double s);
JetValue operator*(double s, JetValue a);
JetValue operator+(JetValue a, double s);
JetValue operator-(const JetValue& a);

/// a^r for real r. The caller guarantees a.value() is in the domain.
JetValue pow(const JetValue& a, double r);
JetValue sqrt(const JetValue& a);
JetValue exp(const JetValue& a);
JetValue log(const JetValue& a);

}  // namespace szego
