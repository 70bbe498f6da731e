#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "kv/fem.hpp"

namespace kv {

// A flow problem on the unit square with no-slip walls. Exact fields are
// closed forms of (x, t); `forcing` is the hand-derived right hand side
//   f = u_t + (u.grad)u - kappa lap(u_t) - nu lap(u) + grad p
// kept consistent with (u, p) by forcing_consistency_check. Problems without
// an exact solution (free decay) provide initial data only.
struct FlowProblem {
  std::string name;
  double nu = 1.0;
  double kappa = 1.0;
  bool has_exact_solution = false;
  bool steady_stokes = false;  // residual is -nu lap(u) + grad p - f only

  std::function<Vec2(const Vec2&, double)> velocity;
  std::function<Mat2(const Vec2&, double)> velocity_gradient;
  std::function<double(const Vec2&, double)> pressure;
  std::function<Vec2(const Vec2&, double)> forcing;  // null for f = 0

  Vec2 initial_velocity(const Vec2& p) const { return velocity(p, 0.0); }
};

// Oscillating polynomial vortex driven by a manufactured force:
//   u1 =  10 cos(t) x^2(x-1)^2 y(y-1)(2y-1)
//   u2 = -10 cos(t) y^2(y-1)^2 x(x-1)(2x-1)
//   p  =  40 cos(t) x y
FlowProblem forced_polynomial_vortex(double nu, double kappa);

// Same velocity profile at amplitude 10 as initial data, f = 0, nu = kappa = 1:
// the flow decays freely.
FlowProblem decaying_polynomial_vortex();

// Free decay from higher-frequency initial data, f = 0, nu = kappa = 1:
//   u0 = (sin^2(3 pi x) sin(6 pi y), -sin^2(3 pi y) sin(6 pi x))
FlowProblem decaying_sine_vortex();

// Steady Stokes companion problem: the vortex profile frozen at t = 0 with
// f = -nu lap(u) + grad p (no time derivative, no convection). Solved in one
// shot, it pins down the saddle solver against known spatial rates.
FlowProblem steady_stokes_vortex(double nu);

// Maximum deviation of the PDE residual over `samples` random (x, t) draws,
// with every derivative in the residual formed by high-order finite
// differences of the closed-form (u, p). Guards the hand-derived forcing.
double forcing_consistency_check(const FlowProblem& problem, int samples,
                                 std::uint64_t seed);

}  // namespace kv
