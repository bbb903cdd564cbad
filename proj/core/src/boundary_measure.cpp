#include "szego/boundary_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "szego/errors.hpp"
#include "szego/quadrature.hpp"

namespace szego {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr int kMaxSolveIterations = 200;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// rho(xi, d) - rho(0, d) = xi * int_0^1 rho_{m0}(u xi, d) du, evaluated
/// without cancellation. Returns the difference and its derivative in xi.
struct RayIncrement {
  const ReinhardtDomain& domain;
  std::vector<double> point;  // (xi, d_1, ..., d_n), first slot overwritten

  std::pair<double, double> operator()(double xi) {
    const GaussLegendreRule& gl = gauss_legendre(20);
    double integral = 0.0;
    for (std::size_t q = 0; q < gl.size(); ++q) {
      point[0] = gl.node[q] * xi;
      integral += gl.weight[q] * evaluate(domain.rho_d(0), point);
    }
    point[0] = xi;
    return {xi * integral, evaluate(domain.rho_d(0), point)};
  }
};

/// Solves rho(xi, d) - rho(0, d) = gap for xi > 0 in eta = log xi, where the
/// increment behaves like a power of xi and Newton is close to linear.
double solve_ray(const ReinhardtDomain& domain, std::span<const double> d, double gap) {
  if (!(gap > 0.0) || !std::isfinite(gap)) {
    throw GeometryError("boundary solve: point is not inside the boundary domain");
  }
  RayIncrement inc{domain, std::vector<double>(domain.dim(), 0.0)};
  std::copy(d.begin(), d.end(), inc.point.begin() + 1);
  const double log_gap = std::log(gap);

  auto residual = [&](double eta, double* slope) {
    const double xi = std::exp(eta);
    const auto [delta, drho] = inc(xi);
    if (!(delta > 0.0) || !(drho > 0.0)) {
      throw GeometryError("boundary solve: rho is not increasing in m0 along the ray");
    }
    if (slope != nullptr) *slope = xi * drho / delta;
    return std::log(delta) - log_gap;
  };

  // Bracket by doubling the step in eta.
  double lo = 0.0;
  double f_lo = residual(lo, nullptr);
  double hi = lo;
  double f_hi = f_lo;
  double step = f_lo < 0.0 ? 1.0 : -1.0;
  for (int i = 0; (f_lo < 0.0) == (f_hi < 0.0); ++i) {
    if (i > 60) throw ConvergenceError("boundary solve: failed to bracket the root");
    lo = hi;
    f_lo = f_hi;
    hi = lo + step;
    f_hi = residual(hi, nullptr);
    step *= 2.0;
  }
  if (lo > hi) {
    std::swap(lo, hi);
    std::swap(f_lo, f_hi);
  }
  if (f_lo == 0.0) return std::exp(lo);
  if (f_hi == 0.0) return std::exp(hi);

  // Safeguarded Newton: fall back to bisection when the step leaves the bracket.
  double eta = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxSolveIterations; ++it) {
    double slope = 0.0;
    const double f = residual(eta, &slope);
    if (f == 0.0) return std::exp(eta);
    if (f < 0.0) {
      lo = eta;
    } else {
      hi = eta;
    }
    double next = eta - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double dx = next - eta;
    eta = next;
    if (std::abs(dx) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(eta))) {
      return std::exp(eta);
    }
  }
  throw ConvergenceError("boundary solve: Newton iteration did not converge");
}

/// Moduli of the boundary point over the ray direction d at relative radius
/// tau = 1 - delta (delta given exactly), plus log of the rim radius T(d).
struct RayPoint {
  std::vector<double> moduli;
  double log_rim = 0.0;
};

RayPoint boundary_point_on_ray(const ReinhardtDomain& domain, std::span<const double> d,
                               double delta) {
  std::vector<double> probe(domain.dim(), 0.0);
  std::copy(d.begin(), d.end(), probe.begin() + 1);
  const double c = domain.rho_at(probe);
  if (!(c > 0.0)) throw GeometryError("rho(0, d) is not positive on the boundary domain");
  const double l = domain.l();
  // rho(xi, d) = c tau^{-l}, so the gap is c (tau^{-l} - 1).
  const double gap = c * std::expm1(-l * std::log1p(-delta));
  const double xi = solve_ray(domain, d, gap);
  const double rim = std::pow(c, -1.0 / l);
  const double t = rim * (1.0 - delta);
  RayPoint out;
  out.log_rim = std::log(rim);
  out.moduli.resize(domain.dim());
  out.moduli[0] = t * xi;
  for (std::size_t i = 0; i < d.size(); ++i) out.moduli[i + 1] = t * d[i];
  return out;
}

double log_induced_density(const ReinhardtDomain& domain, std::span<const double> m) {
  const std::vector<double> g = domain.rho_gradient(m);
  if (!(g[0] > 0.0) || !(m[0] > 0.0)) {
    throw GeometryError("induced density: vanishing normal derivative d rho / d m0");
  }
  return std::log(m[0]) + std::log(norm2(g)) - std::log(g[0]);
}

/// Index of node `flat` along dimension `axis` in a row-major tensor grid.
std::size_t tensor_digit(std::size_t flat, std::size_t axis, std::size_t dims, std::size_t per_dim) {
  for (std::size_t k = dims; k-- > axis + 1;) flat /= per_dim;
  return flat % per_dim;
}

std::size_t checked_power(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > std::numeric_limits<std::size_t>::max() / base / 16) {
      throw Error("quadrature grid too large");
    }
    out *= base;
  }
  return out;
}

}  // namespace

std::string to_string(ChartMapping mapping) {
  return mapping == ChartMapping::Algebraic ? "algebraic" : "tangent";
}

ChartMapping parse_chart_mapping(const std::string& text) {
  if (text == "algebraic") return ChartMapping::Algebraic;
  if (text == "tangent") return ChartMapping::Tangent;
  throw Error("unknown chart mapping '" + text + "' (expected algebraic or tangent)");
}

std::string to_string(Route route) {
  return route == Route::Boundary ? "boundary" : "projective";
}

Route parse_route(const std::string& text) {
  if (text == "boundary") return Route::Boundary;
  if (text == "projective") return Route::Projective;
  throw Error("unknown route '" + text + "' (expected boundary or projective)");
}

void QuadratureSpec::validate() const {
  if (nodes_per_dim < 8) throw Error("quadrature needs at least 8 nodes per dimension");
  if (!(target_rel_tol > 0.0)) throw Error("quadrature tolerance must be positive");
  if (refinement_levels < 1 || refinement_levels > 12) {
    throw Error("refinement levels must be between 1 and 12");
  }
  if (workers < 1) throw Error("worker count must be at least 1");
}

BoundaryChartPoint::BoundaryChartPoint(const ReinhardtDomain& domain, ModuliPoint moduli)
    : moduli_(std::move(moduli)) {
  if (moduli_.size() != domain.dim()) throw GeometryError("boundary point has the wrong dimension");
  const double r = domain.rho_at(moduli_.values());
  if (!(std::abs(r - 1.0) <= 1e-12)) {
    throw GeometryError("point is not on the boundary: rho = " + std::to_string(r));
  }
}

double solve_boundary_radius(const ReinhardtDomain& domain, std::span<const double> r_rest) {
  if (r_rest.size() != static_cast<std::size_t>(domain.n())) {
    throw GeometryError("boundary solve needs n moduli");
  }
  for (double v : r_rest) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw GeometryError("boundary solve: negative modulus");
  }
  const double s = norm2(r_rest);
  std::vector<double> m(domain.dim(), 0.0);
  double r0 = 0.0;
  if (s == 0.0) {
    m[0] = 1.0;
    r0 = std::pow(domain.rho_at(m), -1.0 / domain.l());
  } else {
    std::vector<double> d(r_rest.begin(), r_rest.end());
    for (double& v : d) v /= s;
    std::copy(r_rest.begin(), r_rest.end(), m.begin() + 1);
    const double c = domain.rho_at(m);
    if (!(c < 1.0)) {
      throw GeometryError("point lies outside the boundary domain: rho(0, r) = " +
                          std::to_string(c));
    }
    // rho(s xi, s d) = s^l rho(xi, d) = 1.
    const double gap = (1.0 - c) * std::pow(s, -domain.l());
    r0 = s * solve_ray(domain, d, gap);
  }
  // Polish on the original equation; the ray solve is already accurate in
  // relative terms, this only removes rounding in rho itself.
  m[0] = r0;
  for (int it = 0; it < 8; ++it) {
    const double f = domain.rho_at(m) - 1.0;
    if (std::abs(f) <= 1e-13) return m[0];
    const double df = evaluate(domain.rho_d(0), m);
    if (!(df > 0.0)) break;
    const double next = m[0] - f / df;
    if (!(next > 0.0)) break;
    m[0] = next;
  }
  if (std::abs(domain.rho_at(m) - 1.0) <= 1e-13) return m[0];
  throw ConvergenceError("boundary solve: residual above 1e-13");
}

double induced_density(const ReinhardtDomain& domain, const BoundaryChartPoint& b) {
  return std::exp(log_induced_density(domain, b.moduli().values()));
}

double log_hE_weight(const ReinhardtDomain& domain, const ModuliPoint& y) {
  if (y.size() != domain.dim()) throw GeometryError("h_E: point has the wrong dimension");
  const double n = domain.n();
  const double l = domain.l();
  const double rho = domain.rho_at(y.values());
  if (!(rho > 0.0)) throw GeometryError("h_E: rho is not positive");
  const double grad = norm2(domain.rho_gradient(y.values()));
  if (!(grad > 0.0)) throw GeometryError("h_E: gradient of rho vanishes");
  const double log_rho = std::log(rho);
  const double log_psi = -log_rho / l;
  ModuliPoint m = y;
  for (double& v : m.m) v *= std::exp(log_psi);
  double norm_sq = 0.0;
  for (double v : y.m) norm_sq += v * v;
  // |grad psi| = (1/l) rho^{-1/l - 1} |grad rho|
  const double log_grad_psi = std::log(grad) - std::log(l) + (log_psi - log_rho);
  return std::log(kTwoPi) + domain.u_at(m.values()) + (n + 1.0) * std::log(norm_sq) +
         n * (2.0 * log_psi - std::numbers::ln2) + log_grad_psi;
}

double hE_weight(const ReinhardtDomain& domain, const ModuliPoint& y) {
  return std::exp(log_hE_weight(domain, y));
}

double fs_volume_density(const ChartPoint& z) {
  const auto n = static_cast<double>(z.size());
  return std::pow(2.0, n) / std::pow(1.0 + z.norm_squared(), n + 1.0);
}

QuadratureGrid::QuadratureGrid(std::size_t dim, std::vector<double> log_moduli,
                               std::vector<double> log_weight)
    : dim_(dim), log_moduli_(std::move(log_moduli)), log_weight_(std::move(log_weight)) {
  if (log_moduli_.size() != dim_ * log_weight_.size()) {
    throw Error("quadrature grid: moduli and weights disagree in size");
  }
}

double QuadratureGrid::log_integrate(
    const std::function<double(std::span<const double>)>& log_integrand) const {
  std::vector<double> terms(size());
  for (std::size_t i = 0; i < size(); ++i) terms[i] = log_weight_[i] + log_integrand(log_moduli(i));
  return log_sum_exp(terms);
}

double QuadratureGrid::log_monomial_moment(std::span<const int> exponents) const {
  if (exponents.size() != dim_) throw Error("monomial exponent count does not match the grid");
  std::vector<double> terms(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const double* lm = log_moduli_.data() + i * dim_;
    double t = log_weight_[i];
    for (std::size_t j = 0; j < dim_; ++j) {
      if (exponents[j] != 0) t += 2.0 * exponents[j] * lm[j];
    }
    terms[i] = t;
  }
  return log_sum_exp(terms);
}

double QuadratureGrid::integrate(const std::function<double(std::span<const double>)>& f) const {
  std::vector<double> terms(size());
  std::vector<double> m(dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto lm = log_moduli(i);
    for (std::size_t j = 0; j < dim_; ++j) m[j] = std::exp(lm[j]);
    terms[i] = std::exp(log_weight_[i]) * f(m);
  }
  return pairwise_sum(terms);
}

QuadratureGrid build_boundary_grid(const ReinhardtDomain& domain, int nodes_per_dim, int workers) {
  const auto n = static_cast<std::size_t>(domain.n());
  const auto per_dim = static_cast<std::size_t>(nodes_per_dim);
  const GaussLegendreRule& gl = gauss_legendre(per_dim);
  const std::size_t count = checked_power(per_dim, n);
  const std::size_t dim = n + 1;
  std::vector<double> log_moduli(count * dim);
  std::vector<double> log_weight(count);
  const double log_prefactor = static_cast<double>(n + 1) * std::log(kTwoPi) +
                               static_cast<double>(n - 1) * std::log(kHalfPi);

  parallel_for(count, workers, [&](std::size_t idx) {
    // Axis 0: radius t = T(d) (1 - sigma^2); axes 1..n-1: hyperspherical angles.
    const std::size_t ir = tensor_digit(idx, 0, n, per_dim);
    const double sigma = gl.sigma[ir];
    double log_w = log_prefactor + std::log(gl.weight[ir]);

    std::vector<double> d(n);
    double carry = 1.0;
    for (std::size_t a = 1; a < n; ++a) {
      const std::size_t ia = tensor_digit(idx, a, n, per_dim);
      const double phi = kHalfPi * gl.node[ia];
      d[a - 1] = carry * std::cos(phi);
      carry *= std::sin(phi);
      log_w += std::log(gl.weight[ia]) + static_cast<double>(n - 1 - a) * std::log(std::sin(phi));
    }
    d[n - 1] = carry;

    const double delta = sigma * sigma;
    const RayPoint p = boundary_point_on_ray(domain, d, delta);
    const double log_t = p.log_rim + std::log1p(-delta);
    // dt = T * 2 sigma dsigma, radial factor t^{n-1}, area factor prod r_i.
    log_w += p.log_rim + std::log(2.0 * sigma) + static_cast<double>(n - 1) * log_t;
    for (std::size_t i = 1; i < dim; ++i) log_w += std::log(p.moduli[i]);
    log_w += log_induced_density(domain, p.moduli) + domain.u_at(p.moduli);

    double* out = log_moduli.data() + idx * dim;
    for (std::size_t i = 0; i < dim; ++i) out[i] = std::log(p.moduli[i]);
    log_weight[idx] = log_w;
  });
  return QuadratureGrid(dim, std::move(log_moduli), std::move(log_weight));
}

QuadratureGrid build_projective_grid(const ReinhardtDomain& domain, int nodes_per_dim,
                                     ChartMapping mapping, int workers) {
  const auto n = static_cast<std::size_t>(domain.n());
  const auto per_dim = static_cast<std::size_t>(nodes_per_dim);
  const GaussLegendreRule& gl = gauss_legendre(per_dim);
  const std::size_t count = checked_power(per_dim, n);
  const std::size_t dim = n + 1;

  // Per-dimension radius, log radius and log(dr/ds) on the half-line.
  std::vector<double> radius(per_dim);
  std::vector<double> log_jac(per_dim);
  for (std::size_t q = 0; q < per_dim; ++q) {
    const double s = gl.node[q];
    const double sigma = gl.sigma[q];
    if (mapping == ChartMapping::Algebraic) {
      radius[q] = s / sigma;
      log_jac[q] = -2.0 * std::log(sigma);
    } else {
      const double a = kHalfPi * sigma;
      radius[q] = std::cos(a) / std::sin(a);
      log_jac[q] = std::log(kHalfPi) - 2.0 * std::log(std::sin(a));
    }
  }

  std::vector<double> log_moduli(count * dim);
  std::vector<double> log_weight(count);
  const double log_prefactor = static_cast<double>(n) * (std::log(kTwoPi) + std::numbers::ln2);

  parallel_for(count, workers, [&](std::size_t idx) {
    ModuliPoint y;
    y.m.resize(dim);
    y.m[0] = 1.0;
    double log_w = log_prefactor;
    double norm_sq = 1.0;
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t q = tensor_digit(idx, a, n, per_dim);
      const double r = radius[q];
      y.m[a + 1] = r;
      norm_sq += r * r;
      // weight, Jacobian of the map, polar factor r
      log_w += std::log(gl.weight[q]) + log_jac[q] + std::log(r);
    }
    // Fubini-Study density 2^n / (1 + |z|^2)^{n+1}; 2^n is in the prefactor.
    log_w += log_hE_weight(domain, y) - static_cast<double>(n + 1) * std::log(norm_sq);
    const double log_psi = -std::log(domain.rho_at(y.values())) / domain.l();
    double* out = log_moduli.data() + idx * dim;
    for (std::size_t i = 0; i < dim; ++i) out[i] = std::log(y.m[i]) + log_psi;
    log_weight[idx] = log_w;
  });
  return QuadratureGrid(dim, std::move(log_moduli), std::move(log_weight));
}

GridLadder::GridLadder(const ReinhardtDomain& domain, Route route, QuadratureSpec spec)
    : domain_(&domain), route_(route), spec_(spec) {
  spec_.validate();
}

const QuadratureGrid& GridLadder::level(int l) {
  if (l < 0 || l > spec_.refinement_levels) throw Error("refinement level out of range");
  auto& slot = grids_[l];
  if (!slot) {
    const int nodes = spec_.nodes_per_dim << l;
    slot = std::make_unique<QuadratureGrid>(
        route_ == Route::Boundary
            ? build_boundary_grid(*domain_, nodes, spec_.workers)
            : build_projective_grid(*domain_, nodes, spec_.mapping, spec_.workers));
  }
  return *slot;
}

namespace {

IntegralEstimate integrate_adaptive(GridLadder& ladder, const MomentIntegrand& f) {
  const QuadratureSpec& q = ladder.spec();
  double previous = 0.0;
  double last = ladder.level(0).integrate(f);
  for (int level = 1; level <= q.refinement_levels; ++level) {
    previous = last;
    last = ladder.level(level).integrate(f);
    const double scale = std::abs(last);
    const double err = scale > 0.0 ? std::abs(last - previous) / scale : std::abs(last - previous);
    if (err <= q.target_rel_tol) return IntegralEstimate{last, err, level};
  }
  throw QuadratureError("quadrature did not reach the target tolerance", previous, last);
}

}  // namespace

IntegralEstimate integrate_boundary(const ReinhardtDomain& domain, const MomentIntegrand& f,
                                    const QuadratureSpec& q) {
  GridLadder ladder(domain, Route::Boundary, q);
  return integrate_adaptive(ladder, f);
}

IntegralEstimate integrate_projective(const ReinhardtDomain& domain, const MomentIntegrand& f,
                                      const QuadratureSpec& q) {
  GridLadder ladder(domain, Route::Projective, q);
  return integrate_adaptive(ladder, f);
}

}  // namespace szego
