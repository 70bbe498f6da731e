#include "kv/problems.hpp"

#include <cmath>
#include <random>

#include "kv/errors.hpp"

namespace kv {

namespace {

// Building blocks of the polynomial vortex stream function: the profile is
// u = 10 (g(x) q(y), -g(y) q(x)) with g' = 2q, so the field is divergence
// free and vanishes on the walls together with its tangential derivative.
double g(double s) { return s * s * (s - 1) * (s - 1); }
double dg(double s) { return 2 * s * (s - 1) * (2 * s - 1); }
double ddg(double s) { return 12 * s * s - 12 * s + 2; }
double q(double s) { return s * (s - 1) * (2 * s - 1); }
double dq(double s) { return 6 * s * s - 6 * s + 1; }
double ddq(double s) { return 12 * s - 6; }

Vec2 vortex_profile(const Vec2& x) {
  return {10 * g(x[0]) * q(x[1]), -10 * g(x[1]) * q(x[0])};
}

Mat2 vortex_profile_gradient(const Vec2& x) {
  return {{{10 * dg(x[0]) * q(x[1]), 10 * g(x[0]) * dq(x[1])},
           {-10 * g(x[1]) * dq(x[0]), -10 * dg(x[1]) * q(x[0])}}};
}

// Componentwise Laplacian of the profile.
Vec2 vortex_profile_laplacian(const Vec2& x) {
  return {10 * (ddg(x[0]) * q(x[1]) + g(x[0]) * ddq(x[1])),
          -10 * (g(x[1]) * ddq(x[0]) + ddg(x[1]) * q(x[0]))};
}

Vec2 vortex_profile_convection(const Vec2& x) {
  const Vec2 u = vortex_profile(x);
  const Mat2 grad = vortex_profile_gradient(x);
  return {u[0] * grad[0][0] + u[1] * grad[0][1], u[0] * grad[1][0] + u[1] * grad[1][1]};
}

}  // namespace

FlowProblem forced_polynomial_vortex(double nu, double kappa) {
  FlowProblem p;
  p.name = "forced_polynomial_vortex";
  p.nu = nu;
  p.kappa = kappa;
  p.has_exact_solution = true;
  p.velocity = [](const Vec2& x, double t) {
    const Vec2 u = vortex_profile(x);
    return Vec2{std::cos(t) * u[0], std::cos(t) * u[1]};
  };
  p.velocity_gradient = [](const Vec2& x, double t) {
    Mat2 grad = vortex_profile_gradient(x);
    for (auto& row : grad)
      for (double& v : row) v *= std::cos(t);
    return grad;
  };
  p.pressure = [](const Vec2& x, double t) { return 40 * std::cos(t) * x[0] * x[1]; };
  // f = u_t + (u.grad)u - kappa lap(u_t) - nu lap(u) + grad p for the fields
  // above, written out term by term.
  p.forcing = [nu, kappa](const Vec2& x, double t) {
    const double c = std::cos(t), s = std::sin(t);
    const Vec2 u = vortex_profile(x);
    const Vec2 lap = vortex_profile_laplacian(x);
    const Vec2 conv = vortex_profile_convection(x);
    return Vec2{-s * u[0] + c * c * conv[0] + (kappa * s - nu * c) * lap[0] + 40 * c * x[1],
                -s * u[1] + c * c * conv[1] + (kappa * s - nu * c) * lap[1] + 40 * c * x[0]};
  };
  return p;
}

FlowProblem decaying_polynomial_vortex() {
  FlowProblem p;
  p.name = "decaying_polynomial_vortex";
  p.nu = 1.0;
  p.kappa = 1.0;
  p.has_exact_solution = false;
  p.velocity = [](const Vec2& x, double) { return vortex_profile(x); };
  p.velocity_gradient = [](const Vec2& x, double) { return vortex_profile_gradient(x); };
  return p;
}

FlowProblem decaying_sine_vortex() {
  FlowProblem p;
  p.name = "decaying_sine_vortex";
  p.nu = 1.0;
  p.kappa = 1.0;
  p.has_exact_solution = false;
  p.velocity = [](const Vec2& x, double) {
    const double sx = std::sin(3 * M_PI * x[0]), sy = std::sin(3 * M_PI * x[1]);
    return Vec2{sx * sx * std::sin(6 * M_PI * x[1]), -sy * sy * std::sin(6 * M_PI * x[0])};
  };
  p.velocity_gradient = [](const Vec2& x, double) {
    const double pi = M_PI;
    const double sx = std::sin(3 * pi * x[0]), sy = std::sin(3 * pi * x[1]);
    const double s6x = std::sin(6 * pi * x[0]), s6y = std::sin(6 * pi * x[1]);
    const double c6x = std::cos(6 * pi * x[0]), c6y = std::cos(6 * pi * x[1]);
    return Mat2{{{3 * pi * s6x * s6y, 6 * pi * sx * sx * c6y},
                 {-6 * pi * sy * sy * c6x, -3 * pi * s6y * s6x}}};
  };
  return p;
}

FlowProblem steady_stokes_vortex(double nu) {
  FlowProblem p;
  p.name = "steady_stokes_vortex";
  p.nu = nu;
  p.kappa = 0.0;
  p.has_exact_solution = true;
  p.steady_stokes = true;
  p.velocity = [](const Vec2& x, double) { return vortex_profile(x); };
  p.velocity_gradient = [](const Vec2& x, double) { return vortex_profile_gradient(x); };
  p.pressure = [](const Vec2& x, double) { return 40 * x[0] * x[1]; };
  p.forcing = [nu](const Vec2& x, double) {
    const Vec2 lap = vortex_profile_laplacian(x);
    return Vec2{-nu * lap[0] + 40 * x[1], -nu * lap[1] + 40 * x[0]};
  };
  return p;
}

namespace {

// 4th order central differences. Steps balance truncation against roundoff;
// the composed mixed derivative lap(u_t) amplifies evaluation noise by
// 1/(step_t step_x^2), so it runs on coarser steps where the fourth-order
// truncation is still far below the tolerance of the check.
constexpr double kStepFirst = 1e-3;
constexpr double kStepLap = 5e-3;
constexpr double kStepLapMixed = 2e-2;
constexpr double kStepTimeMixed = 1e-2;

template <typename F>
double fd_first(F&& f, double s0, double h) {
  return (8 * (f(s0 + h) - f(s0 - h)) - (f(s0 + 2 * h) - f(s0 - 2 * h))) / (12 * h);
}

template <typename F>
double fd_second(F&& f, double s0, double h) {
  return (-f(s0 - 2 * h) + 16 * f(s0 - h) - 30 * f(s0) + 16 * f(s0 + h) - f(s0 + 2 * h)) /
         (12 * h * h);
}

}  // namespace

double forcing_consistency_check(const FlowProblem& problem, int samples,
                                 std::uint64_t seed) {
  if (!problem.has_exact_solution || !problem.forcing)
    throw ConfigError("forcing_consistency_check: problem has no exact solution");

  const auto u = [&](const Vec2& x, double t, int c) { return problem.velocity(x, t)[c]; };
  const auto laplacian = [&](const Vec2& x, double t, int c, double h) {
    return fd_second([&](double s) { return u({s, x[1]}, t, c); }, x[0], h) +
           fd_second([&](double s) { return u({x[0], s}, t, c); }, x[1], h);
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> time(0.0, 6.5);

  double worst = 0.0;
  for (int n = 0; n < samples; ++n) {
    const Vec2 x{unit(rng), unit(rng)};
    const double t = problem.steady_stokes ? 0.0 : time(rng);
    const Vec2 f = problem.forcing(x, t);

    for (int c = 0; c < 2; ++c) {
      double residual = -f[c];
      if (c == 0)
        residual += fd_first([&](double s) { return problem.pressure({s, x[1]}, t); }, x[0],
                             kStepFirst);
      else
        residual += fd_first([&](double s) { return problem.pressure({x[0], s}, t); }, x[1],
                             kStepFirst);
      residual -= problem.nu * laplacian(x, t, c, kStepLap);
      if (!problem.steady_stokes) {
        residual += fd_first([&](double s) { return u(x, s, c); }, t, kStepFirst);
        residual -= problem.kappa *
                    fd_first([&](double s) { return laplacian(x, s, c, kStepLapMixed); }, t,
                             kStepTimeMixed);
        const Vec2 ux = problem.velocity(x, t);
        residual +=
            ux[0] * fd_first([&](double s) { return u({s, x[1]}, t, c); }, x[0], kStepFirst) +
            ux[1] * fd_first([&](double s) { return u({x[0], s}, t, c); }, x[1], kStepFirst);
      }
      worst = std::max(worst, std::abs(residual));
    }
  }
  return worst;
}

}  // namespace kv
