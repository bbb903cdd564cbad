#pragma once

#include <cmath>
#include <numbers>
#include <vector>

// Closed-form reference values computed independently of the library.
namespace szego::oracle {

inline long double log_factorial(int k) { return std::lgamma(static_cast<long double>(k) + 1.0L); }

/// log <x^J, x^J> on the unit sphere of C^{n+1} with the induced measure:
/// 2 pi^{n+1} J! / (n + |J|)!.
inline double sphere_log_norm(const std::vector<int>& j) {
  const int n = static_cast<int>(j.size()) - 1;
  int k = 0;
  long double s = std::log(2.0L) + (n + 1) * std::log(std::numbers::pi_v<long double>);
  for (int ji : j) {
    s += log_factorial(ji);
    k += ji;
  }
  return static_cast<double>(s - log_factorial(n + k));
}

/// Pi_k on the unit sphere at |x| = 1: (n+k)! / (2 pi^{n+1} k!).
inline double sphere_pi(int n, int k) {
  const long double pi = std::numbers::pi_v<long double>;
  return static_cast<double>(std::exp(log_factorial(n + k) - log_factorial(k)) /
                             (2.0L * std::pow(pi, n + 1)));
}

/// log <x^J, x^J> on { m0^2 + 4 m1^2 = 1 } with the induced measure.
/// With x = cos^2 t on m0 = cos t, m1 = sin t / 2 the norm is
/// (2 pi)^2 2^{-(2 j1 + 1)} / 2 * int_0^1 x^{j0} (1-x)^{j1} sqrt(1 - 3x/4) dx,
/// and the square root is expanded binomially against Beta integrals.
inline double ellipse_log_norm(int j0, int j1) {
  const long double pi = std::numbers::pi_v<long double>;
  auto log_beta = [](long double a, long double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  };
  long double coeff = 1.0L;  // binom(1/2, m) (-3/4)^m
  long double sum = 0.0L;
  for (int m = 0; m < 400; ++m) {
    const long double term = coeff * std::exp(log_beta(j0 + 1.0L + m, j1 + 1.0L));
    sum += term;
    if (m > 5 && std::abs(term) < 1e-22L * std::abs(sum)) break;
    coeff *= (0.5L - m) / (m + 1.0L) * (-0.75L);
  }
  return static_cast<double>(2.0L * std::log(2.0L * pi) - (2.0L * j1 + 1.0L) * std::log(2.0L) -
                             std::log(2.0L) + std::log(sum));
}

}  // namespace szego::oracle
