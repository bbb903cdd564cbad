#pragma once

#include <vector>

#include "szego/domain.hpp"

namespace szego {

/// Affine coordinates z on the chart U_0 = { x_0 != 0 } of CP^n; the point
/// [1, z_1, ..., z_n].
struct ChartPoint {
  std::vector<Complex> z;

  [[nodiscard]] std::size_t size() const noexcept { return z.size(); }
  /// (1, z_1, ..., z_n).
  [[nodiscard]] ComplexPoint homogeneous() const;
  /// |z|^2.
  [[nodiscard]] double norm_squared() const noexcept;
  /// Chart coordinates of [x] for x_0 != 0.
  static ChartPoint from_homogeneous(const ComplexPoint& x);
};

/// Curvature of the metric h = psi^2 on O(1) over U_0, as the n x n
/// Hermitian coefficient matrix of dz_i ^ dzbar_j:
///   Theta = (2/l) (rho rho_{i jbar} - rho_i rho_{jbar}) / rho^2,  rho at (1, z).
ComplexMatrix curvature_matrix(const ReinhardtDomain& domain, const ChartPoint& z);

/// det Theta = (2 / (l rho^2))^n det(A) (1 - v A^{-1} v^*), with
/// A = rho (rho_{i jbar}) and v = (rho_{1bar}, ..., rho_{nbar}).
/// Throws GeometryError when cond(A) exceeds 1e12.
double det_curvature_affine(const ReinhardtDomain& domain, const ChartPoint& z);

/// det Theta = (2/l)^{n+2} (|x_0|^2 / rho)^{n+1} det H(rho), invariant under x -> c x.
double det_curvature_x(const ReinhardtDomain& domain, const ComplexPoint& x);

struct PositivityResult {
  bool positive = true;
  double min_eigenvalue = 0.0;
  ChartPoint worst;
};

/// Smallest eigenvalue of Theta over `points`; positive iff all are > 0.
PositivityResult positivity_check(const ReinhardtDomain& domain, const std::vector<ChartPoint>& points);

}  // namespace szego
