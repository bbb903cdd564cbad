#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "szego/curvature.hpp"
#include "szego/domain.hpp"
#include "szego/errors.hpp"

namespace szego {

namespace {

std::vector<ModuliPoint> sample_moduli(std::size_t dim, int samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  std::vector<ModuliPoint> out(static_cast<std::size_t>(samples));
  for (auto& p : out) {
    p.m.resize(dim);
    for (auto& v : p.m) v = dist(rng);
  }
  return out;
}

std::string describe(const ModuliPoint& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

template <class Fn>
ValidationCheck guarded(std::string name, Fn&& fn) {
  ValidationCheck check{std::move(name), true, {}};
  try {
    fn(check);
  } catch (const Error& e) {
    check.passed = false;
    check.detail = e.what();
  }
  return check;
}

}  // namespace

ValidationReport validate_domain(const ReinhardtDomain& domain, int samples) {
  if (samples < 1) throw Error("validate_domain needs at least one sample");
  ValidationReport report;
  std::mt19937_64 rng(0xd0'11a1'17ULL);
  const auto points = sample_moduli(domain.dim(), samples, rng);

  report.checks.push_back(guarded("homogeneity", [&](ValidationCheck& c) {
    const auto h = check_homogeneity(domain.rho(), domain.l(), samples, 1e-9);
    c.passed = h.passed;
    c.detail = h.passed ? "worst relative error " + std::to_string(h.worst_relative_error)
                        : h.message;
  }));

  report.checks.push_back(guarded("positivity", [&](ValidationCheck& c) {
    for (const auto& p : points) {
      if (!(domain.rho_at(p.values()) > 0.0)) {
        c.passed = false;
        c.detail = "rho <= 0 at " + describe(p);
        return;
      }
    }
  }));

  report.checks.push_back(guarded("monotonicity", [&](ValidationCheck& c) {
    for (const auto& p : points) {
      const auto g = domain.rho_gradient(p.values());
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] > 0.0)) {
          c.passed = false;
          c.detail = "d rho / d m_" + std::to_string(i) + " = " + std::to_string(g[i]) + " at " +
                     describe(p);
          return;
        }
      }
    }
  }));

  report.checks.push_back(guarded("plurisubharmonicity", [&](ValidationCheck& c) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (const auto& p : points) {
      ComplexPoint x;
      for (double v : p.m) x.x.push_back(std::polar(v, phase(rng)));
      const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(complex_hessian(domain, x).full,
                                                             Eigen::EigenvaluesOnly);
      const auto& ev = eig.eigenvalues();
      const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
      if (ev.minCoeff() < -1e-10 * scale) {
        c.passed = false;
        c.detail = "complex Hessian has eigenvalue " + std::to_string(ev.minCoeff()) + " at " +
                   describe(p);
        return;
      }
    }
  }));

  report.checks.push_back(guarded("curvature_positivity", [&](ValidationCheck& c) {
    std::uniform_real_distribution<double> modulus(0.05, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<ChartPoint> chart(static_cast<std::size_t>(samples));
    for (auto& z : chart) {
      for (int i = 0; i < domain.n(); ++i) z.z.push_back(std::polar(modulus(rng), phase(rng)));
    }
    const PositivityResult r = positivity_check(domain, chart);
    c.passed = r.positive;
    c.detail = "minimum eigenvalue " + std::to_string(r.min_eigenvalue);
  }));

  return report;
}

}  // namespace szego
