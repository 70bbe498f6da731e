#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kv/errors.hpp"
#include "kv/quadrature.hpp"

using kv::gauss_rule;

namespace {

// Exact moments on the reference triangle: int x^p y^q = p! q! / (p+q+2)!.
double exact_moment(int p, int q) {
  double value = 1.0;
  for (int k = 1; k <= p; ++k) value *= k;
  for (int k = 1; k <= q; ++k) value *= k;
  for (int k = 1; k <= p + q + 2; ++k) value /= k;
  return value;
}

double quadrature_moment(const kv::QuadratureRule& rule, int p, int q) {
  double sum = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    const double x = rule.points[i][1];
    const double y = rule.points[i][2];
    sum += rule.weights[i] * std::pow(x, p) * std::pow(y, q);
  }
  return sum;
}

}  // namespace

TEST_CASE("weights sum to the reference area and stay positive") {
  for (int d = 1; d <= 10; ++d) {
    const auto& rule = gauss_rule(d);
    double sum = 0.0;
    for (int i = 0; i < rule.size(); ++i) {
      CHECK(rule.weights[i] > 0.0);
      sum += rule.weights[i];
      double lsum = 0.0;
      for (int k = 0; k < 3; ++k) {
        CHECK(rule.points[i][k] >= 0.0);
        lsum += rule.points[i][k];
      }
      CHECK(lsum == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("every monomial up to the stated degree integrates exactly") {
  for (int d = 1; d <= 10; ++d) {
    const auto& rule = gauss_rule(d);
    for (int p = 0; p <= d; ++p) {
      for (int q = 0; p + q <= d; ++q) {
        const double exact = exact_moment(p, q);
        CHECK(quadrature_moment(rule, p, q) ==
              doctest::Approx(exact).epsilon(1e-13).scale(1.0));
      }
    }
  }
}

TEST_CASE("rules are cached") {
  CHECK(&gauss_rule(4) == &gauss_rule(4));
  CHECK(&gauss_rule(10) == &gauss_rule(10));
}

TEST_CASE("degree outside 1..10 is rejected") {
  CHECK_THROWS_AS(gauss_rule(0), kv::ConfigError);
  CHECK_THROWS_AS(gauss_rule(11), kv::ConfigError);
}
