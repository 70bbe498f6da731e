#pragma once

#include <array>
#include <vector>

namespace kv {

// Quadrature on the reference triangle {(x,y) : x,y >= 0, x+y <= 1}, stored
// as barycentric triples. Weights carry the reference measure: they sum to
// the triangle area 1/2, so integrals over a physical triangle K scale by
// 2*|K|.
struct QuadratureRule {
  int degree = 0;  // every polynomial up to this total degree is integrated exactly
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

// Rule exact to the requested total degree, 1 <= degree <= 10. All weights
// are positive. Rules are built once and cached; repeated calls return the
// same object.
const QuadratureRule& gauss_rule(int degree);

}  // namespace kv
