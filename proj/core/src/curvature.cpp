#include "szego/curvature.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "szego/errors.hpp"

namespace szego {

ComplexPoint ChartPoint::homogeneous() const {
  ComplexPoint x;
  x.x.reserve(z.size() + 1);
  x.x.emplace_back(1.0, 0.0);
  x.x.insert(x.x.end(), z.begin(), z.end());
  return x;
}

double ChartPoint::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& c : z) s += std::norm(c);
  return s;
}

ChartPoint ChartPoint::from_homogeneous(const ComplexPoint& x) {
  if (x.size() < 2 || x.x[0] == 0.0) throw GeometryError("chart U_0 needs x_0 != 0");
  ChartPoint p;
  for (std::size_t i = 1; i < x.size(); ++i) p.z.push_back(x.x[i] / x.x[0]);
  return p;
}

namespace {

struct ChartData {
  double rho = 0.0;
  ComplexVector grad;  // d rho / d zbar_i, i = 1..n
  ComplexMatrix hess;  // rho_{i jbar}, i, j = 1..n
};

ChartData chart_data(const ReinhardtDomain& domain, const ChartPoint& z) {
  if (z.size() + 1 != domain.dim()) throw GeometryError("chart point dimension mismatch");
  const ComplexPoint x = z.homogeneous();
  const ModuliPoint m = x.moduli();
  ChartData d;
  d.rho = domain.rho_at(m.values());
  if (!(d.rho > 0.0)) throw GeometryError("rho is not positive at the chart point");
  const auto n = static_cast<Eigen::Index>(z.size());
  d.grad = complex_gradient(domain, x).tail(n);
  d.hess = complex_hessian(domain, x).minor;
  return d;
}

}  // namespace

ComplexMatrix curvature_matrix(const ReinhardtDomain& domain, const ChartPoint& z) {
  const ChartData d = chart_data(domain, z);
  const auto n = d.grad.size();
  const double scale = 2.0 / (domain.l() * d.rho * d.rho);
  ComplexMatrix theta(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    theta(i, i) = scale * (d.rho * d.hess(i, i).real() - std::norm(d.grad[i]));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // rho_i = conj(d rho / d zbar_i), rho_{jbar} = d rho / d zbar_j
      theta(i, j) = scale * (d.rho * d.hess(i, j) - std::conj(d.grad[i]) * d.grad[j]);
      theta(j, i) = std::conj(theta(i, j));
    }
  }
  return theta;
}

double det_curvature_affine(const ReinhardtDomain& domain, const ChartPoint& z) {
  const ChartData d = chart_data(domain, z);
  const ComplexMatrix a = d.rho * d.hess;
  const Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                              : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12)) {
    std::ostringstream os;
    os << "matrix A = rho (rho_{i jbar}) is singular to working precision (condition " << cond
       << ")";
    throw GeometryError(os.str());
  }
  const Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const ComplexVector v = d.grad;  // row vector (rho_{1bar}, ..., rho_{nbar})
  const ComplexVector vstar = v.conjugate();
  const Complex quad = v.transpose() * lu.solve(vstar);
  const double n = static_cast<double>(d.grad.size());
  return std::pow(2.0 / (domain.l() * d.rho * d.rho), n) * lu.determinant().real() *
         (1.0 - quad.real());
}

double det_curvature_x(const ReinhardtDomain& domain, const ComplexPoint& x) {
  if (x.size() != domain.dim()) throw GeometryError("point dimension mismatch");
  if (x.x[0] == 0.0) throw GeometryError("det_curvature_x needs x_0 != 0");
  const ModuliPoint m = x.moduli();
  const double rho = domain.rho_at(m.values());
  const double n = static_cast<double>(domain.n());
  const double det_h = complex_hessian(domain, x).full.determinant().real();
  return std::pow(2.0 / domain.l(), n + 2.0) * std::pow(m[0] * m[0] / rho, n + 1.0) * det_h;
}

PositivityResult positivity_check(const ReinhardtDomain& domain,
                                  const std::vector<ChartPoint>& points) {
  PositivityResult out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& z : points) {
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(curvature_matrix(domain, z),
                                                           Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (lo < out.min_eigenvalue) {
      out.min_eigenvalue = lo;
      out.worst = z;
    }
  }
  out.positive = out.min_eigenvalue > 0.0;
  return out;
}

}  // namespace szego
