#include "szego/jet.hpp"

#include <cmath>

namespace szego {

JetValue::JetValue(double value, std::size_t vars)
    : value_(value), grad_(vars, 0.0), hess_(vars * (vars + 1) / 2, 0.0) {}

JetValue JetValue::variable(double value, std::size_t index, std::size_t vars) {
  JetValue j(value, vars);
  j.grad_[index] = 1.0;
  return j;
}

JetValue JetValue::compose(double f0, double f1, double f2) const {
  JetValue out(f0, size());
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) out.grad_[i] = f1 * grad_[i];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const std::size_t p = packed(i, j);
      out.hess_[p] = f1 * hess_[p] + f2 * grad_[i] * grad_[j];
    }
  }
  return out;
}

JetValue& JetValue::operator+=(const JetValue& rhs) {
  value_ += rhs.value_;
  for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] += rhs.grad_[i];
  for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] += rhs.hess_[i];
  return *this;
}

JetValue& JetValue::operator-=(const JetValue& rhs) {
  value_ -= rhs.value_;
  for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] -= rhs.grad_[i];
  for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] -= rhs.hess_[i];
  return *this;
}

JetValue& JetValue::operator*=(const JetValue& rhs) {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const std::size_t p = packed(i, j);
      hess_[p] = hess_[p] * rhs.value_ + value_ * rhs.hess_[p] + grad_[i] * rhs.grad_[j] +
                 grad_[j] * rhs.grad_[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) grad_[i] = grad_[i] * rhs.value_ + value_ * rhs.grad_[i];
  value_ *= rhs.value_;
  return *this;
}

JetValue& JetValue::operator/=(const JetValue& rhs) {
  const double v = rhs.value_;
  *this *= rhs.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
  return *this;
}

JetValue& JetValue::operator*=(double s) {
  value_ *= s;
  for (auto& g : grad_) g *= s;
  for (auto& h : hess_) h *= s;
  return *this;
}

JetValue operator+(JetValue a, const JetValue& b) { return a += b; }
JetValue operator-(JetValue a, const JetValue& b) { return a -= b; }
JetValue operator*(JetValue a, const JetValue& b) { return a *= b; }
JetValue operator/(JetValue a, const JetValue& b) { return a /= b; }
JetValue operator*(JetValue a, double s) { return a *= s; }
JetValue operator*(double s, JetValue a) { return a *= s; }
JetValue operator-(const JetValue& a) { return a * -1.0; }

JetValue operator+(JetValue a, double s) {
  a.set_value(a.value() + s);
  return a;
}

JetValue pow(const JetValue& a, double r) {
  const double v = a.value();
  const double f0 = std::pow(v, r);
  const double f1 = r == 0.0 ? 0.0 : r * std::pow(v, r - 1.0);
  const double f2 = (r == 0.0 || r == 1.0) ? 0.0 : r * (r - 1.0) * std::pow(v, r - 2.0);
  return a.compose(f0, f1, f2);
}

JetValue sqrt(const JetValue& a) {
  const double s = std::sqrt(a.value());
  return a.compose(s, 0.5 / s, -0.25 / (s * a.value()));
}

JetValue exp(const JetValue& a) {
  const double e = std::exp(a.value());
  return a.compose(e, e, e);
}

JetValue log(const JetValue& a) {
  const double v = a.value();
  return a.compose(std::log(v), 1.0 / v, -1.0 / (v * v));
}

}  // namespace szego
