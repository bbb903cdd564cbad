#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "szego/errors.hpp"
#include "szego/expression.hpp"

using namespace szego;

namespace {

constexpr const char* kQuartic = "m0^4 + m1^4 + m2^4 + m0^2*m1^2 + m0^2*m2^2 + m1^2*m2^2";

double eval(const char* text, std::vector<double> m) {
  return evaluate(parse_expression(text, m.size()), m);
}

}  // namespace

TEST_CASE("parse builds the expected tree") {
  const Expression e = parse_expression("m0^2 + m1^2", 2);
  CHECK(e.kind() == Expression::Kind::Add);
  CHECK(e.lhs().kind() == Expression::Kind::Pow);
  CHECK(e.lhs().lhs().variable_index() == 0);
  CHECK(e.lhs().exponent() == Rational(2));
  CHECK(e.rhs().lhs().variable_index() == 1);
}

TEST_CASE("parse accepts the quartic in three variables") {
  const Expression e = parse_expression(kQuartic, 3);
  CHECK(e.var_count() == 3);
  CHECK(evaluate(e, std::array{1.0, 1.0, 1.0}) == doctest::Approx(6.0));
}

TEST_CASE("parse reports the offset of the first bad token") {
  try {
    (void)parse_expression("m0^(2", 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
  CHECK_THROWS_AS(parse_expression("m3", 2), ParseError);
  CHECK_THROWS_AS(parse_expression("m0 +", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("m0^1.5", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("cos(m0)", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("(m0", 1), ParseError);
}

TEST_CASE("rational exponents and functions") {
  CHECK(eval("m0^(1/2)", {9.0}) == doctest::Approx(3.0));
  CHECK(eval("m0^(-2/3)", {8.0}) == doctest::Approx(0.25));
  CHECK(eval("sqrt(m0) * exp(0) + log(m1)", {4.0, 1.0}) == doctest::Approx(2.0));
  CHECK(eval("-m0^2", {3.0}) == doctest::Approx(-9.0));
  CHECK(eval("2 - 3 - 4", {0.0}) == doctest::Approx(-5.0));
  CHECK(eval("8 / 4 / 2", {0.0}) == doctest::Approx(1.0));
}

TEST_CASE("evaluate") {
  CHECK(eval("m0^2 + m1^2", {3.0, 4.0}) == 25.0);
  CHECK(eval(kQuartic, {1.0, 1.0, 1.0}) == 6.0);
  CHECK(eval("7", {0.3, 1.2}) == 7.0);
}

TEST_CASE("evaluate rejects points outside the function domain") {
  CHECK_THROWS_AS(eval("log(m0)", {0.0}), DomainError);
  CHECK_THROWS_AS(eval("sqrt(m0 - 2)", {1.0}), DomainError);
  CHECK_THROWS_AS(eval("1 / m0", {0.0}), DomainError);
}

TEST_CASE("printing round-trips") {
  for (const char* text : {"m0^2 + m1^2", kQuartic, "-(m0 - m1) / (m2 + 2)", "m0^(-1/3) * exp(m1 - m2)",
                           "sqrt(m0 * m1) - log(m2)^2", "(m0 - m1) - (m2 - m0)", "m0 / (m1 * m2)"}) {
    const Expression e = parse_expression(text, 3);
    const Expression again = parse_expression(to_string(e), 3);
    CHECK_MESSAGE(e.structurally_equal(again), text);
  }
}

TEST_CASE("symbolic derivatives") {
  const Expression s = parse_expression("m0^2 + m1^2", 2);
  const Expression d = differentiate(s, 0);
  for (double m0 : {0.5, 1.0, 3.0}) CHECK(evaluate(d, std::array{m0, 7.0}) == doctest::Approx(2 * m0));

  Expression q = parse_expression("m0^4", 1);
  for (int i = 0; i < 4; ++i) q = differentiate(q, 0);
  CHECK(evaluate(q, std::array{0.37}) == doctest::Approx(24.0));

  const Expression z = differentiate(parse_expression("m1^3", 2), 0);
  CHECK(evaluate(z, std::array{1.3, 2.1}) == 0.0);

  // derivative output re-parses and agrees with central differences
  const Expression f = parse_expression("exp(m0 * m1) / sqrt(m0 + m1^2) + log(m0)", 2);
  const Expression df = parse_expression(to_string(differentiate(f, 1)), 2);
  const double h = 1e-6;
  const double fd = (evaluate(f, std::array{0.8, 1.1 + h}) - evaluate(f, std::array{0.8, 1.1 - h})) / (2 * h);
  CHECK(evaluate(df, std::array{0.8, 1.1}) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("jets match symbolic derivatives") {
  const Expression f = parse_expression(kQuartic, 3);
  const std::array m{0.7, 1.3, 0.4};
  const JetValue j = eval_jet2(f, m);
  CHECK(j.value() == doctest::Approx(evaluate(f, m)));
  for (std::size_t a = 0; a < 3; ++a) {
    const Expression da = differentiate(f, a);
    CHECK(j.grad(a) == doctest::Approx(evaluate(da, m)));
    for (std::size_t b = 0; b < 3; ++b) {
      CHECK(j.hess(a, b) == doctest::Approx(evaluate(differentiate(da, b), m)));
    }
  }
}

TEST_CASE("jets compose with an inner map") {
  // f(m) = m0 * m1 with m0 = t^2, m1 = t^3 gives t^5
  const Expression f = parse_expression("m0 * m1", 2);
  const double t = 1.7;
  const JetValue x = JetValue::variable(t, 0, 1);
  const std::array args{x * x, x * x * x};
  const JetValue g = eval_jet2(f, args);
  CHECK(g.value() == doctest::Approx(std::pow(t, 5)));
  CHECK(g.grad(0) == doctest::Approx(5 * std::pow(t, 4)));
  CHECK(g.hess(0, 0) == doctest::Approx(20 * std::pow(t, 3)));
}

TEST_CASE("jet arithmetic follows the chain rule") {
  const JetValue x = JetValue::variable(0.6, 0, 2);
  const JetValue y = JetValue::variable(1.9, 1, 2);
  const JetValue f = log(x * y) + exp(x) / y + pow(x, 1.5) * sqrt(y);
  const double h = 1e-5;
  auto fv = [](double a, double b) { return std::log(a * b) + std::exp(a) / b + std::pow(a, 1.5) * std::sqrt(b); };
  CHECK(f.value() == doctest::Approx(fv(0.6, 1.9)));
  CHECK(f.grad(1) == doctest::Approx((fv(0.6, 1.9 + h) - fv(0.6, 1.9 - h)) / (2 * h)).epsilon(1e-8));
  const double mixed = (fv(0.6 + h, 1.9 + h) - fv(0.6 + h, 1.9 - h) - fv(0.6 - h, 1.9 + h) + fv(0.6 - h, 1.9 - h)) /
                       (4 * h * h);
  CHECK(f.hess(0, 1) == doctest::Approx(mixed).epsilon(1e-5));
  CHECK(f.hess(1, 0) == f.hess(0, 1));
}

TEST_CASE("homogeneity check") {
  CHECK(check_homogeneity(parse_expression("m0^2 + m1^2", 2), 2, 20, 1e-9).passed);
  CHECK(check_homogeneity(parse_expression(kQuartic, 3), 4, 20, 1e-9).passed);
  const auto bad = check_homogeneity(parse_expression("m0^2 + m1^3", 2), 2, 20, 1e-9);
  CHECK_FALSE(bad.passed);
  CHECK(bad.first_violation.has_value());
  CHECK_FALSE(bad.message.empty());
}
