#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "szego/curvature.hpp"
#include "szego/domain.hpp"

namespace szego {

/// Half-line map used by the projective chart integrals.
enum class ChartMapping {
  Algebraic,  ///< r = t / (1 - t)
  Tangent,    ///< r = tan(pi t / 2)
};

std::string to_string(ChartMapping mapping);
ChartMapping parse_chart_mapping(const std::string& text);

struct QuadratureSpec {
  int nodes_per_dim = 64;
  ChartMapping mapping = ChartMapping::Algebraic;
  /// Highest refinement level; level L uses nodes_per_dim * 2^L nodes per dimension.
  int refinement_levels = 3;
  double target_rel_tol = 1e-10;
  int workers = 1;

  /// Throws Error unless nodes_per_dim >= 8, target_rel_tol > 0 and refinement_levels >= 1.
  void validate() const;
};

/// Moduli of a point of M = { rho = 1 }, up to the torus action.
class BoundaryChartPoint {
 public:
  /// Throws GeometryError unless |rho(moduli) - 1| <= 1e-12.
  BoundaryChartPoint(const ReinhardtDomain& domain, ModuliPoint moduli);

  [[nodiscard]] const ModuliPoint& moduli() const noexcept { return moduli_; }

 private:
  ModuliPoint moduli_;
};

/// R_0 > 0 with rho(R_0, r_rest) = 1 (to 1e-13), by bracketing plus
/// safeguarded Newton. Throws GeometryError when (0, r_rest) is not in
/// D = { rho(0, .) < 1 }, ConvergenceError when the solve stalls.
double solve_boundary_radius(const ReinhardtDomain& domain, std::span<const double> r_rest);

/// Density of mu_ind against prod R_i dR_i dTheta_i (i >= 1) with one factor
/// 2 pi from Theta_0 already removed: R_0 |grad psi| / |d psi / d R_0|.
double induced_density(const ReinhardtDomain& domain, const BoundaryChartPoint& b);

/// h_E(y) = 2 pi e^{u(y psi(y))} |y|^{2n+2} (psi^2 / 2)^n |grad psi|, homogeneous of degree 0.
double hE_weight(const ReinhardtDomain& domain, const ModuliPoint& y);
/// log h_E(y).
double log_hE_weight(const ReinhardtDomain& domain, const ModuliPoint& y);

/// Density of omega_FS^n / n! against Lebesgue measure on the chart: 2^n / (1 + |z|^2)^{n+1}.
double fs_volume_density(const ChartPoint& z);

/// Tensor quadrature over the boundary M with the torus angles integrated
/// analytically. Node i carries the log-moduli of a point of M and the log of
/// its weight, so that sum_i w_i F(m_i) approximates the integral of F over M
/// against mu.
class QuadratureGrid {
 public:
  QuadratureGrid(std::size_t dim, std::vector<double> log_moduli, std::vector<double> log_weight);

  [[nodiscard]] std::size_t size() const noexcept { return log_weight_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::span<const double> log_moduli(std::size_t i) const {
    return std::span<const double>(log_moduli_).subspan(i * dim_, dim_);
  }
  [[nodiscard]] double log_weight(std::size_t i) const { return log_weight_[i]; }

  /// log of sum_i w_i exp(g_i), g_i = log_integrand(log-moduli of node i).
  [[nodiscard]] double log_integrate(
      const std::function<double(std::span<const double>)>& log_integrand) const;
  /// log of sum_i w_i prod_j m_j^{2 J_j}.
  [[nodiscard]] double log_monomial_moment(std::span<const int> exponents) const;
  /// sum_i w_i F(m_i) for a plain-valued integrand.
  [[nodiscard]] double integrate(const std::function<double(std::span<const double>)>& f) const;

 private:
  std::size_t dim_;
  std::vector<double> log_moduli_;
  std::vector<double> log_weight_;
};

/// D-side grid: Gauss-Legendre over D = { r : rho(0, r) < 1 } in polar form
/// (radius clustered towards the rim of D), R_0 recovered per node by the
/// boundary solve.
QuadratureGrid build_boundary_grid(const ReinhardtDomain& domain, int nodes_per_dim, int workers);

/// Projective-side grid: chart U_0 with each |z_i| on a mapped half-line,
/// weight h_E times the Fubini-Study volume density.
QuadratureGrid build_projective_grid(const ReinhardtDomain& domain, int nodes_per_dim,
                                     ChartMapping mapping, int workers);

enum class Route { Boundary, Projective };
std::string to_string(Route route);
Route parse_route(const std::string& text);

/// Grids for one route at refinement levels 0, 1, ..., built on first use.
/// Not thread-safe; callers escalate levels from a single thread.
class GridLadder {
 public:
  GridLadder(const ReinhardtDomain& domain, Route route, QuadratureSpec spec);

  [[nodiscard]] const QuadratureGrid& level(int l);
  [[nodiscard]] const QuadratureSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] Route route() const noexcept { return route_; }

 private:
  const ReinhardtDomain* domain_;
  Route route_;
  QuadratureSpec spec_;
  std::map<int, std::unique_ptr<QuadratureGrid>> grids_;
};

struct IntegralEstimate {
  double value = 0.0;
  double rel_err = 0.0;  ///< |I_L - I_{L-1}| / |I_L| for the last two levels
  int level = 0;
};

using MomentIntegrand = std::function<double(std::span<const double> moduli)>;

/// (2 pi)^{n+1} times Gauss-Legendre over D, refined until target_rel_tol.
/// Throws QuadratureError with the last two estimates on non-convergence.
IntegralEstimate integrate_boundary(const ReinhardtDomain& domain, const MomentIntegrand& f,
                                    const QuadratureSpec& q);

/// Integral over CP^n of pi^*(F) h_E omega_FS^n / n! on the chart U_0.
IntegralEstimate integrate_projective(const ReinhardtDomain& domain, const MomentIntegrand& f,
                                      const QuadratureSpec& q);

}  // namespace szego
