#include "szego/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Dense>

#include "szego/errors.hpp"

namespace szego {

namespace {

constexpr double kRouteTolerance = 1e-4;
constexpr double kFdStep = 1e-4;

void require_boundary_point(const ReinhardtDomain& domain, const ModuliPoint& m) {
  if (m.size() != domain.dim()) throw GeometryError("point has the wrong dimension");
  if (!m.strictly_positive()) {
    throw GeometryError("axis point: the expansion needs strictly positive moduli");
  }
  const double r = domain.rho_at(m.values());
  if (!(std::abs(r - 1.0) <= 1e-10)) {
    throw GeometryError("point is not on the boundary: rho = " + std::to_string(r));
  }
}

double log_constant_part(const ReinhardtDomain& domain) {
  const double n = domain.n();
  return (n + 2.0) * std::log(2.0 / domain.l()) - std::numbers::ln2 -
         (n + 1.0) * std::log(std::numbers::pi);
}

/// Determinant of a small matrix of jets by Gaussian elimination, pivoting on
/// the values (the pivot order is locally constant, so derivatives are exact).
JetValue jet_determinant(std::vector<std::vector<JetValue>> a) {
  const std::size_t d = a.size();
  JetValue det(1.0, a[0][0].size());
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < d; ++r) {
      if (std::abs(a[r][c].value()) > std::abs(a[pivot][c].value())) pivot = r;
    }
    if (a[pivot][c].value() == 0.0) throw GeometryError("det H(rho) vanishes");
    if (pivot != c) {
      std::swap(a[pivot], a[c]);
      det *= -1.0;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < d; ++r) {
      const JetValue f = a[r][c] / a[c][c];
      for (std::size_t j = c + 1; j < d; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

/// G(m) and its derivatives by central differences with one Richardson level.
struct FdDerivatives {
  std::vector<double> first;
  std::vector<double> second;
};

FdDerivatives fd_log_a0(const ReinhardtDomain& domain, const ModuliPoint& m) {
  const double g0 = log_a0_extended(domain, m);
  FdDerivatives out;
  for (std::size_t mu = 0; mu < m.size(); ++mu) {
    auto at = [&](double h) {
      ModuliPoint p = m;
      p.m[mu] += h;
      return log_a0_extended(domain, p);
    };
    auto differences = [&](double h) {
      const double plus = at(h);
      const double minus = at(-h);
      return std::pair{(plus - minus) / (2.0 * h), (plus - 2.0 * g0 + minus) / (h * h)};
    };
    const double h = kFdStep * m[mu];
    const auto [d1_h, d2_h] = differences(h);
    const auto [d1_h2, d2_h2] = differences(0.5 * h);
    out.first.push_back((4.0 * d1_h2 - d1_h) / 3.0);
    out.second.push_back((4.0 * d2_h2 - d2_h) / 3.0);
  }
  return out;
}

double a1_from_laplacian(double a0, int n, double norm_sq, double laplacian) {
  return a0 / 4.0 * (2.0 * n * (n + 1) + 2.0 * norm_sq * laplacian);
}

}  // namespace

double log_a0_extended(const ReinhardtDomain& domain, const ModuliPoint& m) {
  if (!m.strictly_positive()) throw GeometryError("axis point: a0 needs strictly positive moduli");
  const double n = domain.n();
  const double l = domain.l();
  const double rho = domain.rho_at(m.values());
  if (!(rho > 0.0)) throw GeometryError("rho is not positive");
  const double det = moduli_hessian_form(domain, m).determinant();
  if (!(det > 0.0)) {
    throw GeometryError("degenerate expansion point: det H(rho) = " + std::to_string(det));
  }
  std::vector<double> g = domain.rho_gradient(m.values());
  double grad_sq = 0.0;
  for (double v : g) grad_sq += v * v;
  const double log_rho = std::log(rho);
  const double log_psi = -log_rho / l;
  ModuliPoint b = m;
  for (double& v : b.m) v *= std::exp(log_psi);
  const double log_grad_psi = 0.5 * std::log(grad_sq) - std::log(l) + log_psi - log_rho;
  return log_constant_part(domain) + std::log(det) - domain.u_at(b.values()) -
         (2.0 * n - l * (n + 1.0)) * log_psi - log_grad_psi;
}

JetValue log_a0_jet(const ReinhardtDomain& domain, const ModuliPoint& m) {
  if (!m.strictly_positive()) throw GeometryError("axis point: a0 needs strictly positive moduli");
  const std::size_t d = domain.dim();
  const double n = domain.n();
  const double l = domain.l();
  const auto vals = m.values();

  const JetValue rho = eval_jet2(domain.rho(), vals);
  if (!(rho.value() > 0.0)) throw GeometryError("rho is not positive");
  std::vector<JetValue> grad;
  std::vector<JetValue> coord;
  for (std::size_t i = 0; i < d; ++i) {
    grad.push_back(eval_jet2(domain.rho_d(i), vals));
    coord.push_back(JetValue::variable(m[i], i, d));
  }
  std::vector<std::vector<JetValue>> k(d, std::vector<JetValue>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      JetValue e = eval_jet2(domain.rho_dd(i, j), vals) * 0.25;
      if (i == j) e += grad[i] / coord[i] * 0.25;
      k[i][j] = e;
      k[j][i] = e;
    }
  }
  const JetValue det = jet_determinant(std::move(k));
  if (!(det.value() > 0.0)) {
    throw GeometryError("degenerate expansion point: det H(rho) = " + std::to_string(det.value()));
  }

  JetValue grad_sq(0.0, d);
  for (const auto& g : grad) grad_sq += g * g;
  const JetValue log_rho = log(rho);
  const JetValue log_psi = log_rho * (-1.0 / l);
  const JetValue psi = exp(log_psi);
  std::vector<JetValue> boundary;
  for (std::size_t i = 0; i < d; ++i) boundary.push_back(coord[i] * psi);
  const JetValue u = eval_jet2(domain.u(), std::span<const JetValue>(boundary));
  const JetValue log_grad_psi = log(grad_sq) * 0.5 + (-std::log(l)) + log_psi - log_rho;

  return log(det) + log_constant_part(domain) - u - log_psi * (2.0 * n - l * (n + 1.0)) -
         log_grad_psi;
}

double a0_closed_form(const ReinhardtDomain& domain, const ComplexPoint& x) {
  const ModuliPoint m = x.moduli();
  require_boundary_point(domain, m);
  return std::exp(log_a0_extended(domain, m));
}

A1Detail a1_closed_form_detail(const ReinhardtDomain& domain, const ComplexPoint& x) {
  const ModuliPoint m = x.moduli();
  require_boundary_point(domain, m);
  const int n = domain.n();
  const double norm_sq = x.norm_squared();

  const JetValue g = log_a0_jet(domain, m);
  const FdDerivatives fd = fd_log_a0(domain, m);
  A1Detail out;
  out.a0 = std::exp(g.value());
  for (std::size_t mu = 0; mu < m.size(); ++mu) {
    out.laplacian += 0.25 * (g.hess(mu, mu) + g.grad(mu) / m[mu]);
    out.laplacian_fd += 0.25 * (fd.second[mu] + fd.first[mu] / m[mu]);
  }
  out.a1 = a1_from_laplacian(out.a0, n, norm_sq, out.laplacian);
  out.a1_fd = a1_from_laplacian(out.a0, n, norm_sq, out.laplacian_fd);
  out.disagreement = std::abs(out.a1 - out.a1_fd) / std::abs(out.a1);
  return out;
}

double a1_closed_form(const ReinhardtDomain& domain, const ComplexPoint& x) {
  const A1Detail d = a1_closed_form_detail(domain, x);
  if (!(d.disagreement <= kRouteTolerance)) {
    throw ConvergenceError("a1: jet and finite-difference routes disagree by " +
                           std::to_string(d.disagreement) + " relative");
  }
  return d.a1;
}

AsymptoticCoefficients closed_form_coefficients(const ReinhardtDomain& domain,
                                                const ComplexPoint& x) {
  AsymptoticCoefficients c;
  c.a0 = a0_closed_form(domain, x);
  c.a1 = a1_closed_form(domain, x);
  c.leading_power = domain.n();
  return c;
}

namespace {

/// Value at h = 0 of the polynomial through (h_i, f_i).
double extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& f) {
  double out = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (j != i) w *= h[j] / (h[j] - h[i]);
    }
    out += w * f[i];
  }
  return out;
}

}  // namespace

ExpansionFit fit_expansion(std::vector<std::pair<int, double>> pairs, int n) {
  if (n < 1) throw FitError("expansion fit needs n >= 1");
  std::sort(pairs.begin(), pairs.end());
  std::set<int> distinct;
  for (const auto& [k, v] : pairs) {
    if (k <= 0) throw FitError("expansion fit needs positive k");
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw FitError("expansion fit needs positive finite values (k=" + std::to_string(k) + ")");
    }
    if (!distinct.insert(k).second) throw FitError("duplicate k in the expansion fit");
  }
  if (pairs.size() < 6) throw FitError("expansion fit needs at least 6 distinct k values");

  // Upper half of the k range, at least four points.
  const double mid = 0.5 * (pairs.front().first + pairs.back().first);
  std::size_t first = 0;
  while (first < pairs.size() && pairs[first].first < mid) ++first;
  first = std::min(first, pairs.size() - 4);
  const std::vector<std::pair<int, double>> top(pairs.begin() + static_cast<long>(first),
                                                pairs.end());

  // log Pi_k = p log k + c + b1 / k + b2 / k^2
  Eigen::MatrixXd a(static_cast<Eigen::Index>(top.size()), 4);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(top.size()));
  for (std::size_t i = 0; i < top.size(); ++i) {
    const double k = top[i].first;
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = std::log(k);
    a(r, 1) = 1.0;
    a(r, 2) = 1.0 / k;
    a(r, 3) = 1.0 / (k * k);
    rhs(r) = std::log(top[i].second);
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(rhs);

  // Three spread points: the start, middle and end of the upper half.
  const std::size_t picks[3] = {0, (top.size() - 1) / 2, top.size() - 1};
  std::vector<double> h;
  std::vector<double> f0;
  for (std::size_t p : picks) {
    const double k = top[p].first;
    h.push_back(1.0 / k);
    f0.push_back(top[p].second / std::pow(k, n));
  }
  ExpansionFit fit;
  fit.power = coef(0);
  fit.a0 = extrapolate_to_zero(h, f0);
  std::vector<double> f1;
  for (std::size_t i = 0; i < 3; ++i) {
    const double k = top[picks[i]].first;
    f1.push_back((top[picks[i]].second - fit.a0 * std::pow(k, n)) / std::pow(k, n - 1));
  }
  fit.a1 = extrapolate_to_zero(h, f1);
  if (!std::isfinite(fit.power) || !std::isfinite(fit.a0) || !std::isfinite(fit.a1)) {
    throw FitError("degenerate sequence: the fit is not finite");
  }
  return fit;
}

std::string leading_power_notice(int n) {
  return "leading power fixed at k^" + std::to_string(n) + " with a1 on k^" +
         std::to_string(n - 1) + "; the normalization k^" + std::to_string(n + 1) + ", k^" +
         std::to_string(n) + " contradicts the exact sphere kernel and is not used";
}

ExpansionReport expansion_report(const ReinhardtDomain& domain, const ComplexPoint& x,
                                 const std::vector<NormTable>& tables) {
  if (tables.size() < 6) throw FitError("verification needs at least 6 values of k");
  ExpansionReport report;
  report.n = domain.n();
  report.leading_power = domain.n();
  report.route = tables.front().route;
  report.boundary_point = x.moduli();
  report.warnings.push_back(leading_power_notice(domain.n()));

  const A1Detail closed = a1_closed_form_detail(domain, x);
  report.closed_a0 = closed.a0;
  report.closed_a1 = closed.a1;
  report.a1_fd = closed.a1_fd;
  report.a1_route_disagreement = closed.disagreement;
  if (!(closed.disagreement <= kRouteTolerance)) {
    report.warnings.push_back("a1 jet and finite-difference routes disagree by " +
                              std::to_string(closed.disagreement) + " relative");
  }

  std::vector<std::pair<int, double>> pairs;
  for (const NormTable& t : tables) {
    if (t.route != report.route) throw Error("norm tables mix integration routes");
    double worst = 0.0;
    for (const auto& e : t.entries) worst = std::max(worst, e.rel_err);
    report.ks.push_back(t.k);
    report.table_rel_err.push_back(worst);
    if (!t.complete) {
      report.warnings.push_back("norm table k=" + std::to_string(t.k) +
                                " incomplete: largest rel_err " + std::to_string(worst));
    }
    const double pi = partial_szego(domain, t.k, x, t);
    report.pi_values.push_back(pi);
    pairs.emplace_back(t.k, pi);
  }

  const ExpansionFit fit = fit_expansion(pairs, domain.n());
  report.fitted_power = fit.power;
  report.fitted_a0 = fit.a0;
  report.fitted_a1 = fit.a1;
  report.rel_err_a0 = std::abs(fit.a0 - closed.a0) / std::abs(closed.a0);
  report.rel_err_a1 = std::abs(fit.a1 - closed.a1) / std::abs(closed.a1);

  const int n = domain.n();
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    const double k = report.ks[i];
    const double model = closed.a0 * std::pow(k, n) + closed.a1 * std::pow(k, n - 1);
    report.model_curve.push_back(model);
    report.residual_curve.push_back(report.pi_values[i] - model);
  }
  return report;
}

ExpansionReport verify_expansion(const ReinhardtDomain& domain, const ComplexPoint& x, int k_min,
                                 int k_max, const QuadratureSpec& q, Route route) {
  q.validate();
  if (k_min < 1) throw FitError("verification needs k_min >= 1");
  if (k_max - k_min + 1 < 6) throw FitError("verification needs at least 6 values of k");
  // Fail on a bad point before any quadrature runs.
  require_boundary_point(domain, x.moduli());
  std::vector<int> ks;
  for (int k = k_min; k <= k_max; ++k) ks.push_back(k);
  NormTableBuilder builder(domain, route, q);
  return expansion_report(domain, x, builder.build(ks));
}

}  // namespace szego
