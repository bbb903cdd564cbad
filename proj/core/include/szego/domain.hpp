#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "szego/expression.hpp"
#include "szego/jet.hpp"

namespace szego {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Moduli (|x_0|, ..., |x_n|) of a point of C^{n+1}.
struct ModuliPoint {
  std::vector<double> m;

  [[nodiscard]] std::size_t size() const noexcept { return m.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return m[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return m; }
  [[nodiscard]] bool strictly_positive() const noexcept;
};

/// A point x = (x_0, ..., x_n) of C^{n+1}.
struct ComplexPoint {
  std::vector<Complex> x;

  [[nodiscard]] std::size_t size() const noexcept { return x.size(); }
  [[nodiscard]] ModuliPoint moduli() const;
  [[nodiscard]] double norm_squared() const noexcept;
  [[nodiscard]] ComplexPoint scaled(double c) const;
  /// Point with the given moduli and zero phases.
  static ComplexPoint from_moduli(const ModuliPoint& m);
};

/// Domain { rho < 1 } in C^{n+1} with rho a function of the moduli,
/// homogeneous of order l, and boundary log-weight u (mu = e^u mu_ind).
///
/// First and second symbolic derivatives of rho are built once at
/// construction; the domain is immutable afterwards.
class ReinhardtDomain {
 public:
  /// Parses rho and u over m0..mn and checks homogeneity of rho at 1e-9.
  /// Throws ParseError or GeometryError.
  static ReinhardtDomain create(int n, double l, std::string_view rho, std::string_view u = "0");

  /// Builds the domain without the homogeneity check (negative controls).
  static ReinhardtDomain unchecked(int n, double l, Expression rho, Expression u);

  [[nodiscard]] int n() const noexcept { return n_; }
  /// Ambient complex dimension n+1.
  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(n_) + 1; }
  [[nodiscard]] double l() const noexcept { return l_; }
  [[nodiscard]] const Expression& rho() const noexcept { return rho_; }
  [[nodiscard]] const Expression& u() const noexcept { return u_; }
  /// d rho / d m_i.
  [[nodiscard]] const Expression& rho_d(std::size_t i) const { return d1_[i]; }
  /// d^2 rho / d m_i d m_j.
  [[nodiscard]] const Expression& rho_dd(std::size_t i, std::size_t j) const;

  [[nodiscard]] double rho_at(std::span<const double> m) const { return evaluate(rho_, m); }
  [[nodiscard]] double u_at(std::span<const double> m) const { return evaluate(u_, m); }
  /// Moduli gradient of rho.
  [[nodiscard]] std::vector<double> rho_gradient(std::span<const double> m) const;
  /// Moduli Hessian of rho.
  [[nodiscard]] Eigen::MatrixXd rho_hessian(std::span<const double> m) const;

 private:
  ReinhardtDomain(int n, double l, Expression rho, Expression u);

  int n_;
  double l_;
  Expression rho_;
  Expression u_;
  std::vector<Expression> d1_;
  std::vector<Expression> d2_;  // packed upper triangle
};

/// psi = rho^(-1/l) with moduli gradient and Hessian.
JetValue psi_jet(const ReinhardtDomain& domain, const ModuliPoint& p);

/// (d rho / d xbar_0, ..., d rho / d xbar_n) via d rho/d xbar_i = rho_{m_i} x_i / (2 m_i).
/// An axis coordinate is accepted only when rho_{m_i} vanishes there.
ComplexVector complex_gradient(const ReinhardtDomain& domain, const ComplexPoint& x);

struct ComplexHessian {
  ComplexMatrix full;   ///< (d^2 rho / dx_i dxbar_j), 0 <= i, j <= n
  ComplexMatrix minor;  ///< lower-right n x n block, 1 <= i, j <= n
};

/// Complex Hessian of rho by the torus-invariant chain rule. On an axis
/// m_i = 0 the diagonal entry takes its limit rho_{m_i m_i} / 2, which needs
/// rho_{m_i} = 0 there; GeometryError otherwise.
ComplexHessian complex_hessian(const ReinhardtDomain& domain, const ComplexPoint& x);

/// The real symmetric matrix K with H(rho) = D^* K D, D = diag(x_i / m_i).
/// det H(rho) = det K.
Eigen::MatrixXd moduli_hessian_form(const ReinhardtDomain& domain, const ModuliPoint& m);

/// Relative residuals of the Euler identities for the homogeneous rho.
struct EulerResiduals {
  double holomorphic = 0.0;      ///< sum x_i d rho/dx_i - l rho / 2
  double antiholomorphic = 0.0;  ///< sum xbar_i d rho/dxbar_i - l rho / 2
  std::vector<double> rows;      ///< sum_i x_i H_{i jbar} - (l/2) d rho/dxbar_j, per j

  [[nodiscard]] double max() const noexcept;
};

EulerResiduals euler_residuals(const ReinhardtDomain& domain, const ComplexPoint& x);

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  [[nodiscard]] bool passed() const noexcept;
  [[nodiscard]] std::vector<std::string> failures() const;
};

/// Samples the domain invariants (homogeneity, positivity, monotonicity,
/// plurisubharmonicity) and curvature positivity on the chart U_0.
ValidationReport validate_domain(const ReinhardtDomain& domain, int samples);

}  // namespace szego
