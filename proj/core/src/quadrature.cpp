#include "kv/quadrature.hpp"

#include <array>
#include <cmath>

#include "kv/errors.hpp"

namespace kv {

namespace {

struct Gauss1D {
  std::vector<double> x;  // nodes on [0, 1]
  std::vector<double> w;
};

// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence,
// accurate to machine precision for the small orders used here.
Gauss1D gauss_legendre_01(int m) {
  Gauss1D rule;
  rule.x.resize(m);
  rule.w.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = 0.5 * (x + 1.0);
    rule.w[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // [0,1] weight: 2/((1-x^2)P'^2) / 2
  }
  return rule;
}

// Conical product of two 1D rules under the collapse (a, b) -> (a, b(1-a)).
// The outer integrand carries the extra factor (1-a), hence one more point.
QuadratureRule build_rule(int degree) {
  QuadratureRule rule;
  rule.degree = degree;
  const Gauss1D ga = gauss_legendre_01((degree + 3) / 2);
  const Gauss1D gb = gauss_legendre_01((degree + 2) / 2);
  for (std::size_t i = 0; i < ga.x.size(); ++i) {
    for (std::size_t j = 0; j < gb.x.size(); ++j) {
      const double x = ga.x[i];
      const double y = gb.x[j] * (1.0 - ga.x[i]);
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(ga.w[i] * gb.w[j] * (1.0 - ga.x[i]));
    }
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_rule(int degree) {
  if (degree < 1 || degree > 10)
    throw ConfigError("gauss_rule: degree must be between 1 and 10");
  static const auto rules = [] {
    std::array<QuadratureRule, 10> all;
    for (int d = 1; d <= 10; ++d) all[d - 1] = build_rule(d);
    return all;
  }();
  return rules[degree - 1];
}

}  // namespace kv
