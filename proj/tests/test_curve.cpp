#include <doctest.h>

#include <semibart/curve.hpp>
#include <semibart/stats.hpp>

#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

using namespace semibart;
using doctest::Contains;

TEST_CASE("zero effect returns the baseline unchanged") {
  CausalCurveQuery q;
  q.p0 = {0.05, 0.2, 0.5, 0.77, 0.99};
  const auto points = causal_curve(q);
  REQUIRE(points.size() == 5);
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].p0 == q.p0[i]);
    CHECK_FALSE(points[i].has_modifier);
    CHECK(std::abs(points[i].p1 - q.p0[i]) <= 1e-12);
  }
}

TEST_CASE("a positive shift moves every baseline up, monotonically") {
  CausalCurveQuery q;
  q.p0 = {0.1, 0.2, 0.3, 0.6, 0.9};
  q.psi1 = 0.4;
  const auto points = causal_curve(q);
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].p1 > points[i].p0);
    CHECK(points[i].p1 < 1.0);
    if (i > 0) CHECK(points[i].p1 > points[i - 1].p1);
  }
}

TEST_CASE("spot values on the probability scale") {
  CausalCurveQuery q;
  q.p0 = {0.2};
  q.psi1 = 0.15;
  const auto a = causal_curve(q);
  CHECK(format_fixed(a[0].p1, 4) == "0.2446");
  CHECK(format_fixed(a[0].p1, 2) == "0.24");

  q.psi1 = 0.18;
  q.psi2 = 0.07;
  q.modifier_values = {2.0};
  const auto b = causal_curve(q);
  REQUIRE(b.size() == 1);
  CHECK(b[0].has_modifier);
  CHECK(b[0].modifier == 2.0);
  CHECK(format_fixed(b[0].p1, 2) == "0.30");

  q.psi1 = 0.07;
  q.psi2 = 0.38;
  q.modifier_values = {1.0};
  const auto c = causal_curve(q);
  CHECK(format_fixed(c[0].p1, 2) == "0.35");
  CHECK(format_fixed(c[0].p1, 4) == "0.3477");
}

TEST_CASE("the curve agrees with direct density integration") {
  // p1 = Phi(Phi^-1(p0) + delta) equals the normal mass below that bound.
  const double p0 = 0.35, delta = 0.6;
  CausalCurveQuery q;
  q.p0 = {p0};
  q.psi1 = delta;
  const double p1 = causal_curve(q)[0].p1;
  const double bound = normal_quantile(p0) + delta;
  const double mass = 0.5 + oracle::simpson(
                                [](double t) {
                                  return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
                                },
                                0.0, bound, 2000);
  CHECK(p1 == doctest::Approx(mass).epsilon(1e-10));
}

TEST_CASE("modifier values fan the curve out per baseline") {
  CausalCurveQuery q;
  q.p0 = {0.2, 0.4};
  q.psi1 = 0.1;
  q.psi2 = 0.2;
  q.modifier_values = {0.0, 1.0, 2.0};
  const auto points = causal_curve(q);
  REQUIRE(points.size() == 6);  // p0-major, modifier-minor
  CHECK(points[0].p0 == 0.2);
  CHECK(points[0].modifier == 0.0);
  CHECK(points[2].p0 == 0.2);
  CHECK(points[2].modifier == 2.0);
  CHECK(points[3].p0 == 0.4);
  CHECK(points[3].modifier == 0.0);
  CHECK(points[0].p1 < points[1].p1);  // larger modifier, larger shift
  CHECK(points[1].p1 < points[2].p1);
  CHECK(points[3].p1 < points[4].p1);
}

TEST_CASE("curve_csv prints p0 and modifier in full, p1 to 4 decimals") {
  CausalCurveQuery q;
  q.p0 = {0.2};
  q.psi1 = 0.15;
  CHECK(curve_csv(causal_curve(q)) == "p0,modifier,p1\n0.2,,0.2446\n");

  q.psi1 = 0.18;
  q.psi2 = 0.07;
  q.modifier_values = {2.0};
  CHECK(curve_csv(causal_curve(q)) == "p0,modifier,p1\n0.2,2,0.3010\n");
}

TEST_CASE("queries are validated") {
  CausalCurveQuery q;
  CHECK_THROWS_WITH_AS(causal_curve(q), Contains("at least one baseline"), std::runtime_error);
  q.p0 = {0.0};
  CHECK_THROWS_WITH_AS(causal_curve(q), Contains("baseline probability"), std::runtime_error);
  q.p0 = {1.0};
  CHECK_THROWS_WITH_AS(causal_curve(q), Contains("baseline probability"), std::runtime_error);
  q.p0 = {0.2};
  q.psi2 = 0.1;
  CHECK_THROWS_WITH_AS(causal_curve(q), Contains("psi2 given without modifier values"),
                       std::runtime_error);
  q.psi2 = 0.0;
  q.psi1 = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(causal_curve(q), Contains("coefficients must be finite"),
                       std::runtime_error);
}
