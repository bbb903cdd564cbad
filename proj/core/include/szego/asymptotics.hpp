#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "szego/kernel.hpp"

namespace szego {

/// Closed-form coefficients of Pi_k(x) ~ a0 k^p + a1 k^(p-1) at a boundary point.
struct AsymptoticCoefficients {
  double a0 = 0.0;
  double a1 = 0.0;
  int leading_power = 0;  ///< p = n
};

/// a0 = (2/l)^{n+2} det H(rho) / (2 pi^{n+1} e^{u(x psi)} psi^{2n - l(n+1)} |grad psi|).
/// Requires |rho(x) - 1| <= 1e-10 and strictly positive moduli; throws
/// GeometryError on an axis point or when det H(rho) <= 0.
double a0_closed_form(const ReinhardtDomain& domain, const ComplexPoint& x);

/// ln a0 extended off the boundary by the same formula, as a function of the
/// moduli. Degree-0 homogeneous.
double log_a0_extended(const ReinhardtDomain& domain, const ModuliPoint& m);
/// The same with moduli gradient and Hessian.
JetValue log_a0_jet(const ReinhardtDomain& domain, const ModuliPoint& m);

struct A1Detail {
  double a0 = 0.0;
  double a1 = 0.0;              ///< from the jet route
  double a1_fd = 0.0;           ///< from central differences with one Richardson level
  double laplacian = 0.0;       ///< sum_mu d^2 ln a0 / dx_mu dxbar_mu, jet route
  double laplacian_fd = 0.0;
  double disagreement = 0.0;    ///< |a1 - a1_fd| / |a1|
};

/// a1 = (a0/4) (2n(n+1) + 2 |x|^2 sum_mu d^2 ln a0 / dx_mu dxbar_mu), with the
/// mixed derivative (G_mm + G_m / m) / 4 taken in the moduli. Both routes are
/// always evaluated.
A1Detail a1_closed_form_detail(const ReinhardtDomain& domain, const ComplexPoint& x);

/// As a1_closed_form_detail, but throws ConvergenceError when the jet and
/// finite-difference routes disagree by more than 1e-4 relative.
double a1_closed_form(const ReinhardtDomain& domain, const ComplexPoint& x);

AsymptoticCoefficients closed_form_coefficients(const ReinhardtDomain& domain,
                                                const ComplexPoint& x);

struct ExpansionFit {
  double power = 0.0;
  double a0 = 0.0;
  double a1 = 0.0;
};

/// Fits Pi_k ~ a0 k^n + a1 k^{n-1}.
///
/// The power is the log k coefficient of a least-squares fit of log Pi_k on
/// {log k, 1, 1/k, 1/k^2} over the upper half of the k range. a0 is the
/// polynomial-in-1/k extrapolation to 1/k = 0 of Pi_k / k^n through three
/// spread points of the upper half, and a1 the same extrapolation of
/// (Pi_k - a0 k^n) / k^{n-1}. Needs at least 6 distinct positive k and
/// positive values; throws FitError otherwise.
ExpansionFit fit_expansion(std::vector<std::pair<int, double>> pairs, int n);

struct ExpansionReport {
  int n = 0;
  int leading_power = 0;
  Route route = Route::Boundary;
  std::vector<int> ks;
  std::vector<double> pi_values;
  double fitted_power = 0.0;
  double fitted_a0 = 0.0;
  double fitted_a1 = 0.0;
  double closed_a0 = 0.0;
  double closed_a1 = 0.0;
  double rel_err_a0 = 0.0;
  double rel_err_a1 = 0.0;
  double a1_fd = 0.0;
  double a1_route_disagreement = 0.0;
  /// a0 k^n + a1 k^{n-1} with the closed-form coefficients.
  std::vector<double> model_curve;
  /// Pi_k - model_k.
  std::vector<double> residual_curve;
  /// Largest norm-table relative error per k.
  std::vector<double> table_rel_err;
  ModuliPoint boundary_point;
  std::vector<std::string> warnings;
};

/// Pi_k at x from ready norm tables (one per k, all of the same route), the
/// fit, and the comparison with the closed forms. x must lie on the boundary,
/// off the axes.
ExpansionReport expansion_report(const ReinhardtDomain& domain, const ComplexPoint& x,
                                 const std::vector<NormTable>& tables);

/// Builds norm tables for every k in [k_min, k_max] and calls expansion_report.
ExpansionReport verify_expansion(const ReinhardtDomain& domain, const ComplexPoint& x, int k_min,
                                 int k_max, const QuadratureSpec& q,
                                 Route route = Route::Boundary);

/// Notice attached to every report about the leading power.
std::string leading_power_notice(int n);

}  // namespace szego
