#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "szego/asymptotics.hpp"
#include "szego/errors.hpp"

using namespace szego;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr const char* kQuartic = "m0^4 + m1^4 + m2^4 + m0^2*m1^2 + m0^2*m2^2 + m1^2*m2^2";

ComplexPoint moduli_point(std::vector<double> m) { return ComplexPoint::from_moduli(ModuliPoint{std::move(m)}); }

std::vector<std::pair<int, double>> sequence(int lo, int hi, auto f) {
  std::vector<std::pair<int, double>> s;
  for (int k = lo; k <= hi; ++k) s.emplace_back(k, f(k));
  return s;
}

}  // namespace

TEST_CASE("closed-form coefficients on spheres") {
  const auto s1 = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  const auto c1 = closed_form_coefficients(s1, moduli_point({0.6, 0.8}));
  CHECK(c1.leading_power == 1);
  CHECK(c1.a0 == doctest::Approx(1 / (2 * kPi * kPi)).epsilon(1e-12));
  CHECK(c1.a1 == doctest::Approx(1 / (2 * kPi * kPi)).epsilon(1e-12));

  const auto s2 = ReinhardtDomain::create(2, 2, "m0^2 + m1^2 + m2^2");
  const auto x = ComplexPoint{{std::polar(0.48, 0.3), std::polar(0.6, 2.0), std::polar(0.64, -1.0)}};
  const auto c2 = closed_form_coefficients(s2, x);
  CHECK(c2.a0 == doctest::Approx(1 / (2 * std::pow(kPi, 3))).epsilon(1e-12));
  CHECK(c2.a1 == doctest::Approx(3 / (2 * std::pow(kPi, 3))).epsilon(1e-10));
  // ln a0 constant on the sphere, so a1 = a0 n(n+1)/2
  CHECK(c2.a1 == doctest::Approx(c2.a0 * 3).epsilon(1e-10));
}

TEST_CASE("closed-form a0 on the Fermat quartic") {
  const auto fermat = ReinhardtDomain::create(1, 4, "m0^4 + m1^4");
  const double m = std::pow(2.0, -0.25);
  CHECK(a0_closed_form(fermat, moduli_point({m, m})) == doctest::Approx(std::pow(2.0, -0.75) / (kPi * kPi)).epsilon(1e-13));
}

TEST_CASE("closed forms need an off-axis boundary point") {
  const auto s1 = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  CHECK_THROWS_AS(a0_closed_form(s1, moduli_point({0.3, 0.4})), GeometryError);
  CHECK_THROWS_AS(a0_closed_form(s1, moduli_point({1.0, 0.0})), GeometryError);
}

TEST_CASE("jet and finite-difference routes agree") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (const auto& [n, l, rho] : {std::tuple{1, 4.0, "m0^4 + m1^4"}, std::tuple{2, 4.0, kQuartic},
                                  std::tuple{1, 2.0, "m0^2 + 4*m1^2"}}) {
    const auto d = ReinhardtDomain::create(n, l, rho);
    for (int i = 0; i < 5; ++i) {
      std::vector<double> m;
      for (int j = 0; j <= n; ++j) m.push_back(u(rng));
      const auto proj = interior_rescale(d, moduli_point(m));
      const A1Detail a = a1_closed_form_detail(d, proj.boundary);
      CHECK(a.a0 > 0.0);
      CHECK(a.disagreement < 1e-4);
      CHECK(a.laplacian == doctest::Approx(a.laplacian_fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("extended ln a0 is scale invariant and its jet is consistent") {
  const auto d = ReinhardtDomain::create(2, 4, kQuartic);
  const ModuliPoint m{{0.5, 0.9, 0.3}};
  const double v = log_a0_extended(d, m);
  CHECK(log_a0_extended(d, ModuliPoint{{1.0, 1.8, 0.6}}) == doctest::Approx(v).epsilon(1e-12));
  const JetValue j = log_a0_jet(d, m);
  CHECK(j.value() == doctest::Approx(v).epsilon(1e-12));
  const double h = 1e-6;
  const double fd = (log_a0_extended(d, ModuliPoint{{0.5, 0.9 + h, 0.3}}) -
                     log_a0_extended(d, ModuliPoint{{0.5, 0.9 - h, 0.3}})) / (2 * h);
  CHECK(j.grad(1) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("fit of an exact two-term sequence") {
  const auto f = fit_expansion(sequence(5, 40, [](int k) { return 3.0 * k * k + 5.0 * k; }), 2);
  CHECK(f.power == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(f.a0 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.a1 == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("fit of the exact sphere kernel") {
  const double c = 1 / (2 * kPi * kPi);
  const auto f = fit_expansion(sequence(10, 60, [&](int k) { return (k + 1) * c; }), 1);
  CHECK(f.a0 == doctest::Approx(c).epsilon(1e-10));
  CHECK(f.a1 == doctest::Approx(c).epsilon(1e-10));
  CHECK(std::abs(f.power - 1.0) < 1e-2);
}

TEST_CASE("fit tolerates small noise") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(-1e-8, 1e-8);
  const double c = 1 / (2 * kPi * kPi);
  const auto f = fit_expansion(sequence(10, 60, [&](int k) { return (k + 1) * c * (1 + noise(rng)); }), 1);
  CHECK(f.a0 == doctest::Approx(c).epsilon(1e-6));
}

TEST_CASE("fit input checks") {
  CHECK_THROWS_AS(fit_expansion(sequence(1, 5, [](int k) { return 1.0 * k; }), 1), FitError);
  CHECK_THROWS_AS(fit_expansion(sequence(1, 8, [](int k) { return k == 4 ? -1.0 : 1.0 * k; }), 1), FitError);
  auto dup = sequence(1, 8, [](int k) { return 1.0 * k; });
  for (auto& [k, v] : dup) k = 3;
  CHECK_THROWS_AS(fit_expansion(dup, 1), FitError);
}

TEST_CASE("end-to-end expansion on the sphere") {
  const auto s1 = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  QuadratureSpec q;
  q.nodes_per_dim = 32;
  const auto r = verify_expansion(s1, moduli_point({0.6, 0.8}), 10, 60, q);
  CHECK(r.rel_err_a0 <= 1e-6);
  CHECK(r.rel_err_a1 <= 1e-4);
  CHECK(r.ks.size() == 51);
  CHECK(r.pi_values.size() == r.ks.size());
  CHECK(r.residual_curve.size() == r.ks.size());
  for (std::size_t i = 0; i < r.ks.size(); ++i) {
    CHECK(r.pi_values[i] == doctest::Approx(oracle::sphere_pi(1, r.ks[i])).epsilon(1e-11));
    CHECK(std::abs(r.residual_curve[i]) < 1e-10);
  }
  CHECK_FALSE(r.warnings.empty());
  CHECK_THROWS_AS(verify_expansion(s1, moduli_point({0.6, 0.8}), 10, 13, q), FitError);
  CHECK_THROWS_AS(verify_expansion(s1, moduli_point({0.6, 0.7}), 10, 30, q), GeometryError);
}
