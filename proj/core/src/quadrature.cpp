#include "szego/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numbers>

#include "szego/errors.hpp"

namespace szego {

namespace {

GaussLegendreRule build_rule(std::size_t n) {
  GaussLegendreRule rule;
  rule.node.resize(n);
  rule.sigma.resize(n);
  rule.weight.resize(n);
  const auto nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // i-th largest root of P_n
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const auto kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x_i > 0 maps to the upper half of (0, 1); its mirror -x_i to the lower half.
    const std::size_t hi = n - 1 - i;
    const std::size_t lo = i;
    rule.node[hi] = 0.5 * (1.0 + x);
    rule.sigma[hi] = 0.5 * (1.0 - x);
    rule.weight[hi] = 0.5 * w;
    rule.node[lo] = 0.5 * (1.0 - x);
    rule.sigma[lo] = 0.5 * (1.0 + x);
    rule.weight[lo] = 0.5 * w;
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(std::size_t points) {
  if (points == 0) throw Error("Gauss-Legendre rule needs at least one point");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[points];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(build_rule(points));
  return *slot;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double log_sum_exp(std::span<const double> log_terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : log_terms) top = std::max(top, v);
  if (!std::isfinite(top)) return top;
  std::vector<double> shifted(log_terms.size());
  std::transform(log_terms.begin(), log_terms.end(), shifted.begin(),
                 [top](double v) { return std::exp(v - top); });
  return top + std::log(pairwise_sum(shifted));
}

}  // namespace szego
