#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "szego/boundary_measure.hpp"
#include "szego/curvature.hpp"
#include "szego/errors.hpp"
#include "szego/quadrature.hpp"

using namespace szego;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureSpec spec(int nodes = 32) {
  QuadratureSpec q;
  q.nodes_per_dim = nodes;
  return q;
}

double one(std::span<const double>) { return 1.0; }

}  // namespace

TEST_CASE("Gauss-Legendre rule on (0, 1)") {
  const auto& rule = gauss_legendre(20);
  double sum = 0.0;
  double cubic = 0.0;
  for (std::size_t i = 0; i < rule.node.size(); ++i) {
    sum += rule.weight[i];
    cubic += rule.weight[i] * std::pow(rule.node[i], 39);
    CHECK(rule.sigma[i] == doctest::Approx(1.0 - rule.node[i]));
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cubic == doctest::Approx(1.0 / 40.0).epsilon(1e-14));
  CHECK(&gauss_legendre(20) == &rule);
}

TEST_CASE("stable summation") {
  const std::array terms{1000.0, 1000.0 + std::log(3.0)};
  CHECK(log_sum_exp(terms) == doctest::Approx(1000.0 + std::log(4.0)));
  std::vector<double> v(1000001, 0.1);
  v[0] = 1e8;
  CHECK(pairwise_sum(v) == doctest::Approx(1e8 + 100000.0).epsilon(1e-15));
}

TEST_CASE("boundary radius") {
  const auto sphere = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  CHECK(solve_boundary_radius(sphere, std::array{0.6}) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(solve_boundary_radius(sphere, std::array{0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(solve_boundary_radius(sphere, std::array{1.5}), GeometryError);

  const auto fermat = ReinhardtDomain::create(1, 4, "m0^4 + m1^4");
  CHECK(solve_boundary_radius(fermat, std::array{0.5}) == doctest::Approx(std::pow(1 - 0.0625, 0.25)).epsilon(1e-14));
  // close to the rim of D the residual is tiny but the root stays accurate
  const double r = 1 - 1e-9;
  CHECK(solve_boundary_radius(fermat, std::array{r}) ==
        doctest::Approx(std::pow(1 - std::pow(r, 4), 0.25)).epsilon(1e-9));

  CHECK_THROWS_AS(BoundaryChartPoint(sphere, ModuliPoint{{0.6, 0.7}}), GeometryError);
  CHECK_NOTHROW(BoundaryChartPoint(sphere, ModuliPoint{{0.6, 0.8}}));
}

TEST_CASE("boundary masses of spheres") {
  const auto s1 = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  const auto s2 = ReinhardtDomain::create(2, 2, "m0^2 + m1^2 + m2^2");
  CHECK(integrate_boundary(s1, one, spec()).value == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
  CHECK(integrate_boundary(s2, one, spec()).value == doctest::Approx(kPi * kPi * kPi).epsilon(1e-12));
  const auto m2 = integrate_boundary(s1, [](std::span<const double> m) { return m[0] * m[0] * m[1] * m[1]; }, spec());
  CHECK(m2.value == doctest::Approx(kPi * kPi / 3).epsilon(1e-12));
}

TEST_CASE("projective masses") {
  const auto s1 = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  CHECK(integrate_projective(s1, one, spec()).value == doctest::Approx(2 * kPi * kPi).epsilon(1e-10));
  const auto mono = integrate_projective(s1, [](std::span<const double> m) { return m[0] * m[0] * m[1] * m[1]; }, spec());
  CHECK(mono.value == doctest::Approx(kPi * kPi / 3).epsilon(1e-10));

  const auto fermat = ReinhardtDomain::create(1, 4, "m0^4 + m1^4");
  const double b = integrate_boundary(fermat, one, spec()).value;
  CHECK(integrate_projective(fermat, one, spec(64)).value == doctest::Approx(b).epsilon(1e-8));
}

TEST_CASE("Fubini-Study density") {
  CHECK(fs_volume_density(ChartPoint{{{0.0, 0.0}}}) == 2.0);
  CHECK(fs_volume_density(ChartPoint{{{1.0, 0.0}, {0.0, 1.0}}}) == doctest::Approx(4.0 / 27.0));
  // total FS masses by the radial integrals int_0^inf 2 r (1+r^2)^-2 dr = 1
  // and int 4 r s (1+r^2+s^2)^-3 dr ds = 1/2 over the torus
  const auto& rule = gauss_legendre(200);
  double one_dim = 0.0;
  for (std::size_t i = 0; i < rule.node.size(); ++i) {
    const double r = rule.node[i] / rule.sigma[i];
    const double jac = 1.0 / (rule.sigma[i] * rule.sigma[i]);
    one_dim += rule.weight[i] * jac * 2 * kPi * r * fs_volume_density(ChartPoint{{{r, 0.0}}});
  }
  CHECK(one_dim == doctest::Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("h_E weight") {
  const auto sphere = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  CHECK(hE_weight(sphere, ModuliPoint{{0.6, 0.8}}) == doctest::Approx(kPi));
  CHECK(hE_weight(sphere, ModuliPoint{{1.0, 2.5}}) == doctest::Approx(kPi));
  const auto doubled = ReinhardtDomain::create(1, 2, "m0^2 + m1^2", "log(2)");
  CHECK(hE_weight(doubled, ModuliPoint{{0.6, 0.8}}) == doctest::Approx(2 * kPi));

  const auto quartic = ReinhardtDomain::create(2, 4, "m0^4 + m1^4 + m2^4 + m0^2*m1^2 + m0^2*m2^2 + m1^2*m2^2");
  const ModuliPoint y{{1.0, 0.4, 2.2}};
  const double w = hE_weight(quartic, y);
  for (double c : {0.1, 3.7}) {
    CHECK(hE_weight(quartic, ModuliPoint{{c, 0.4 * c, 2.2 * c}}) == doctest::Approx(w).epsilon(1e-12));
  }
  CHECK(log_hE_weight(quartic, y) == doctest::Approx(std::log(w)));
}

TEST_CASE("grids and refinement") {
  const auto sphere = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  const QuadratureGrid g = build_boundary_grid(sphere, 16, 1);
  CHECK(g.dim() == 2);
  CHECK(g.size() == 16);
  const std::array j{1, 1};
  CHECK(std::exp(g.log_monomial_moment(j)) == doctest::Approx(kPi * kPi / 3).epsilon(1e-12));

  GridLadder ladder(sphere, Route::Boundary, spec(8));
  CHECK(ladder.level(2).size() == 32);
  CHECK(&ladder.level(2) == &ladder.level(2));

  // identical grids regardless of worker count
  const QuadratureGrid g4 = build_boundary_grid(sphere, 16, 4);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.log_weight(i) == g4.log_weight(i));
}

TEST_CASE("quadrature failure carries the last two estimates") {
  const auto fermat = ReinhardtDomain::create(1, 4, "m0^4 + m1^4");
  QuadratureSpec q = spec(8);
  q.refinement_levels = 1;
  q.target_rel_tol = 1e-15;
  try {
    (void)integrate_projective(fermat, one, q);
    FAIL("expected a quadrature error");
  } catch (const QuadratureError& e) {
    CHECK(e.previous_estimate() != e.last_estimate());
    CHECK(std::isfinite(e.last_estimate()));
  }
}

TEST_CASE("quadrature spec validation") {
  QuadratureSpec q;
  q.nodes_per_dim = 4;
  CHECK_THROWS(q.validate());
  q = QuadratureSpec{};
  q.target_rel_tol = 0.0;
  CHECK_THROWS(q.validate());
  CHECK(parse_chart_mapping("tangent") == ChartMapping::Tangent);
  CHECK(parse_route("projective") == Route::Projective);
}
