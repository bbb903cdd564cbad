#include "szego/domain.hpp"

#include <algorithm>
#include <cmath>

#include "szego/errors.hpp"

namespace szego {

bool ModuliPoint::strictly_positive() const noexcept {
  return std::all_of(m.begin(), m.end(), [](double v) { return v > 0.0 && std::isfinite(v); });
}

ModuliPoint ComplexPoint::moduli() const {
  ModuliPoint p;
  p.m.reserve(x.size());
  for (const auto& c : x) p.m.push_back(std::abs(c));
  return p;
}

double ComplexPoint::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& c : x) s += std::norm(c);
  return s;
}

ComplexPoint ComplexPoint::scaled(double c) const {
  ComplexPoint out = *this;
  for (auto& v : out.x) v *= c;
  return out;
}

ComplexPoint ComplexPoint::from_moduli(const ModuliPoint& m) {
  ComplexPoint p;
  p.x.reserve(m.size());
  for (double v : m.m) p.x.emplace_back(v, 0.0);
  return p;
}

ReinhardtDomain::ReinhardtDomain(int n, double l, Expression rho, Expression u)
    : n_(n), l_(l), rho_(std::move(rho)), u_(std::move(u)) {
  const std::size_t d = dim();
  d1_.reserve(d);
  for (std::size_t i = 0; i < d; ++i) d1_.push_back(differentiate(rho_, i));
  d2_.reserve(d * (d + 1) / 2);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) d2_.push_back(differentiate(d1_[i], j));
  }
}

ReinhardtDomain ReinhardtDomain::create(int n, double l, std::string_view rho, std::string_view u) {
  if (n < 1) throw GeometryError("domain dimension n must be at least 1");
  if (!(l > 0.0)) throw GeometryError("homogeneity order l must be positive");
  const auto vars = static_cast<std::size_t>(n) + 1;
  Expression r = parse_expression(rho, vars);
  Expression w = parse_expression(u.empty() ? std::string_view("0") : u, vars);
  const HomogeneityReport report = check_homogeneity(r, l, 20, 1e-9);
  if (!report.passed) {
    throw GeometryError("rho is not homogeneous of order " + std::to_string(l) + ": " +
                        report.message);
  }
  return ReinhardtDomain(n, l, std::move(r), std::move(w));
}

ReinhardtDomain ReinhardtDomain::unchecked(int n, double l, Expression rho, Expression u) {
  if (n < 1) throw GeometryError("domain dimension n must be at least 1");
  return ReinhardtDomain(n, l, std::move(rho), std::move(u));
}

const Expression& ReinhardtDomain::rho_dd(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return d2_[i * dim() - i * (i + 1) / 2 + j];
}

std::vector<double> ReinhardtDomain::rho_gradient(std::span<const double> m) const {
  std::vector<double> g(dim());
  for (std::size_t i = 0; i < dim(); ++i) g[i] = evaluate(d1_[i], m);
  return g;
}

Eigen::MatrixXd ReinhardtDomain::rho_hessian(std::span<const double> m) const {
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd h(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      h(i, j) = h(j, i) = evaluate(rho_dd(i, j), m);
    }
  }
  return h;
}

namespace {

void require_dim(const ReinhardtDomain& domain, std::size_t size) {
  if (size != domain.dim()) {
    throw GeometryError("point has " + std::to_string(size) + " coordinates, domain needs " +
                        std::to_string(domain.dim()));
  }
}

void require_off_axes(const ModuliPoint& m) {
  if (!m.strictly_positive()) {
    throw GeometryError("axis point: every modulus must be strictly positive");
  }
}

}  // namespace

JetValue psi_jet(const ReinhardtDomain& domain, const ModuliPoint& p) {
  require_dim(domain, p.size());
  const JetValue rho = eval_jet2(domain.rho(), p.values());
  if (!(rho.value() > 0.0)) throw GeometryError("rho is not positive at the evaluation point");
  return pow(rho, -1.0 / domain.l());
}

ComplexVector complex_gradient(const ReinhardtDomain& domain, const ComplexPoint& x) {
  require_dim(domain, x.size());
  const ModuliPoint m = x.moduli();
  const std::vector<double> g = domain.rho_gradient(m.values());
  ComplexVector out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (m[i] > 0.0) {
      out[static_cast<Eigen::Index>(i)] = g[i] * x.x[i] / (2.0 * m[i]);
    } else if (g[i] == 0.0) {
      // rho_{m_i} vanishes at least linearly on the axis; the term tends to 0
      out[static_cast<Eigen::Index>(i)] = 0.0;
    } else {
      throw GeometryError("singular axis point: d rho / d m_" + std::to_string(i) +
                          " is nonzero where m_" + std::to_string(i) + " = 0");
    }
  }
  return out;
}

Eigen::MatrixXd moduli_hessian_form(const ReinhardtDomain& domain, const ModuliPoint& m) {
  require_dim(domain, m.size());
  require_off_axes(m);
  const std::vector<double> g = domain.rho_gradient(m.values());
  Eigen::MatrixXd k = domain.rho_hessian(m.values()) / 4.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += g[i] / (4.0 * m[i]);
  }
  return k;
}

ComplexHessian complex_hessian(const ReinhardtDomain& domain, const ComplexPoint& x) {
  require_dim(domain, x.size());
  const ModuliPoint m = x.moduli();
  const std::vector<double> g = domain.rho_gradient(m.values());
  const Eigen::MatrixXd k = domain.rho_hessian(m.values()) / 4.0;
  const auto d = static_cast<Eigen::Index>(x.size());
  // Unit phase x_i / m_i, and 0 on an axis where rho = f(m_i^2) makes the
  // mixed terms vanish.
  std::vector<Complex> phase(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (m[i] > 0.0) {
      phase[i] = x.x[i] / m[i];
    } else if (g[i] != 0.0) {
      throw GeometryError("singular axis point: d rho / d m_" + std::to_string(i) +
                          " is nonzero where m_" + std::to_string(i) + " = 0");
    }
  }
  ComplexMatrix h(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    // rho_{m_i} / m_i tends to rho_{m_i m_i} on the axis
    h(i, i) = m[ui] > 0.0 ? k(i, i) + g[ui] / (4.0 * m[ui]) : 2.0 * k(i, i);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      h(i, j) = k(i, j) * std::conj(phase[ui]) * phase[static_cast<std::size_t>(j)];
      h(j, i) = std::conj(h(i, j));
    }
  }
  ComplexHessian out;
  out.minor = h.bottomRightCorner(d - 1, d - 1);
  out.full = std::move(h);
  return out;
}

double EulerResiduals::max() const noexcept {
  double worst = std::max(holomorphic, antiholomorphic);
  for (double r : rows) worst = std::max(worst, r);
  return worst;
}

EulerResiduals euler_residuals(const ReinhardtDomain& domain, const ComplexPoint& x) {
  require_dim(domain, x.size());
  const ModuliPoint m = x.moduli();
  require_off_axes(m);
  const double rho = domain.rho_at(m.values());
  const double target = 0.5 * domain.l() * rho;
  const ComplexVector g = complex_gradient(domain, x);
  const ComplexMatrix h = complex_hessian(domain, x).full;

  Complex hol = 0.0;
  Complex anti = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    hol += x.x[i] * std::conj(g[ii]);
    anti += std::conj(x.x[i]) * g[ii];
  }
  const double scale = std::max(std::abs(target), 1e-300);
  EulerResiduals out;
  out.holomorphic = std::abs(hol - target) / scale;
  out.antiholomorphic = std::abs(anti - target) / scale;
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    Complex row = 0.0;
    double row_scale = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      const Complex term = x.x[static_cast<std::size_t>(i)] * h(i, j);
      row += term;
      row_scale += std::abs(term);
    }
    const Complex rhs = 0.5 * domain.l() * g[j];
    row_scale = std::max({row_scale, std::abs(rhs), 1e-300});
    out.rows.push_back(std::abs(row - rhs) / row_scale);
  }
  return out;
}

bool ValidationReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

}  // namespace szego
