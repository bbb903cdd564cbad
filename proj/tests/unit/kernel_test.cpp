#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "szego/errors.hpp"
#include "szego/kernel.hpp"

using namespace szego;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureSpec spec(int nodes = 32) {
  QuadratureSpec q;
  q.nodes_per_dim = nodes;
  return q;
}

ComplexPoint moduli_point(std::vector<double> m) { return ComplexPoint::from_moduli(ModuliPoint{std::move(m)}); }

}  // namespace

TEST_CASE("multi-index enumeration") {
  const auto a = enumerate_multi_indices(1, 2);
  REQUIRE(a.size() == 3);
  CHECK(a[0].j == std::vector<int>{2, 0});
  CHECK(a[1].j == std::vector<int>{1, 1});
  CHECK(a[2].j == std::vector<int>{0, 2});
  CHECK(enumerate_multi_indices(2, 3).size() == 10);
  CHECK(multi_index_count(2, 3) == 10);
  const auto z = enumerate_multi_indices(2, 0);
  REQUIRE(z.size() == 1);
  CHECK(z[0].j == std::vector<int>{0, 0, 0});
  CHECK(multi_index_count(3, 40) == 12341);
  for (const auto& J : enumerate_multi_indices(3, 7)) CHECK(J.degree() == 7);
}

TEST_CASE("monomial norms on the sphere") {
  const auto s1 = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  for (Route route : {Route::Boundary, Route::Projective}) {
    const auto e = monomial_norm(s1, MultiIndex{{1, 1}}, spec(), route);
    CHECK(e.log_norm == doctest::Approx(std::log(kPi * kPi / 3)).epsilon(1e-10));
    CHECK(std::exp(e.log_norm) == doctest::Approx(3.289868).epsilon(1e-6));
  }
  const auto zero = monomial_norm(s1, MultiIndex{{0, 0}}, spec(), Route::Boundary);
  CHECK(zero.log_norm == doctest::Approx(std::log(2 * kPi * kPi)).epsilon(1e-12));

  const auto s2 = ReinhardtDomain::create(2, 2, "m0^2 + m1^2 + m2^2");
  NormTableBuilder builder(s2, Route::Boundary, spec());
  for (const auto& t : builder.build(std::vector<int>{0, 4, 9})) {
    CHECK(t.complete);
    CHECK(t.entries.size() == multi_index_count(2, t.k));
    for (const auto& e : t.entries) {
      CHECK(std::abs(std::expm1(e.log_norm - oracle::sphere_log_norm(e.index.j))) < 1e-11);
    }
  }
}

TEST_CASE("monomial norms on the ellipsoid") {
  const auto e = ReinhardtDomain::create(1, 2, "m0^2 + 4*m1^2");
  for (Route route : {Route::Boundary, Route::Projective}) {
    NormTableBuilder builder(e, route, spec(64));
    for (const auto& t : builder.build(std::vector<int>{0, 1, 6, 15})) {
      for (const auto& entry : t.entries) {
        const double ref = oracle::ellipse_log_norm(entry.index.j[0], entry.index.j[1]);
        CHECK(std::abs(std::expm1(entry.log_norm - ref)) < 1e-8);
      }
    }
  }
}

TEST_CASE("partial Szego kernel on spheres") {
  const auto s1 = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  NormTableBuilder b1(s1, Route::Boundary, spec());
  for (int k : {0, 1, 5, 17}) {
    const NormTable t = b1.build(k);
    for (const auto& x : {moduli_point({0.6, 0.8}), moduli_point({1.0, 0.0}), moduli_point({0.0, 1.0})}) {
      CHECK(partial_szego(s1, k, x, t) == doctest::Approx((k + 1) / (2 * kPi * kPi)).epsilon(1e-11));
    }
  }
  const ComplexPoint phased{{std::polar(0.6, 1.0), std::polar(0.8, -2.0)}};
  CHECK(partial_szego(s1, 5, phased, b1.build(5)) == doctest::Approx(6 / (2 * kPi * kPi)).epsilon(1e-11));

  const auto s2 = ReinhardtDomain::create(2, 2, "m0^2 + m1^2 + m2^2");
  NormTableBuilder b2(s2, Route::Boundary, spec());
  const double pi3 = partial_szego(s2, 3, moduli_point({0.48, 0.6, 0.64}), b2.build(3));
  CHECK(pi3 == doctest::Approx(20 / (2 * kPi * kPi * kPi)).epsilon(1e-11));
  CHECK(pi3 == doctest::Approx(0.32252).epsilon(1e-4));
}

TEST_CASE("table mismatches are rejected") {
  const auto s1 = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  NormTableBuilder b(s1, Route::Boundary, spec());
  const NormTable t = b.build(3);
  CHECK_THROWS(partial_szego(s1, 4, moduli_point({0.6, 0.8}), t));
  NormTable partial = t;
  partial.entries.pop_back();
  CHECK_THROWS(partial_szego(s1, 3, moduli_point({0.6, 0.8}), partial));
  NormTable incomplete = t;
  incomplete.complete = false;
  incomplete.entries[1].converged = false;
  CHECK_THROWS_AS(incomplete.require_complete(), QuadratureError);
}

TEST_CASE("interior rescaling") {
  const auto s1 = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  const auto on = interior_rescale(s1, moduli_point({0.6, 0.8}));
  CHECK(on.factor(7) == doctest::Approx(1.0));
  const auto in = interior_rescale(s1, moduli_point({0.3, 0.4}));
  CHECK(in.rho == doctest::Approx(0.25));
  CHECK(in.factor(3) == doctest::Approx(std::pow(0.25, 3)));
  CHECK(in.boundary.x[0].real() == doctest::Approx(0.6));

  NormTableBuilder b(s1, Route::Boundary, spec());
  const NormTable t = b.build(4);
  CHECK(partial_szego(s1, 4, moduli_point({0.3, 0.4}), t) ==
        doctest::Approx(in.factor(4) * partial_szego(s1, 4, in.boundary, t)).epsilon(1e-13));
}

TEST_CASE("Bergman kernel on the projective line") {
  // h_E = pi on the sphere, so B_k = pi (k+1) / (2 pi^2)
  const auto s1 = ReinhardtDomain::create(1, 2, "m0^2 + m1^2");
  NormTableBuilder b(s1, Route::Projective, spec());
  const NormTable t1 = b.build(1);
  CHECK(bergman_diag(s1, 1, ChartPoint{{{1.0, 0.0}}}, t1) == doctest::Approx(1 / kPi).epsilon(1e-9));
  const NormTable t6 = b.build(6);
  CHECK(bergman_diag(s1, 6, ChartPoint{{std::polar(2.5, 0.4)}}, t6) == doctest::Approx(7 / (2 * kPi)).epsilon(1e-9));
}

TEST_CASE("tables do not depend on the worker count") {
  const auto quartic = ReinhardtDomain::create(2, 4, "m0^4 + m1^4 + m2^4 + m0^2*m1^2 + m0^2*m2^2 + m1^2*m2^2");
  QuadratureSpec q1 = spec(16);
  QuadratureSpec q4 = q1;
  q4.workers = 4;
  const NormTable a = NormTableBuilder(quartic, Route::Boundary, q1).build(5);
  const NormTable c = NormTableBuilder(quartic, Route::Boundary, q4).build(5);
  REQUIRE(a.entries.size() == c.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].log_norm == c.entries[i].log_norm);
    CHECK(a.entries[i].level == c.entries[i].level);
  }
}
