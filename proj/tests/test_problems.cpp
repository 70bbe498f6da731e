#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kv/errors.hpp"
#include "kv/problems.hpp"

using kv::FlowProblem;
using kv::Vec2;

namespace {

// Central difference divergence of the problem's velocity field.
double fd_divergence(const FlowProblem& p, const Vec2& x, double t) {
  const double h = 1e-5;
  const double dux = (p.velocity({x[0] + h, x[1]}, t)[0] - p.velocity({x[0] - h, x[1]}, t)[0]) /
                     (2 * h);
  const double dvy = (p.velocity({x[0], x[1] + h}, t)[1] - p.velocity({x[0], x[1] - h}, t)[1]) /
                     (2 * h);
  return dux + dvy;
}

void check_walls(const FlowProblem& p) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double s = unit(rng), t = unit(rng) * 2.0;
    for (const Vec2& x : {Vec2{0.0, s}, Vec2{1.0, s}, Vec2{s, 0.0}, Vec2{s, 1.0}}) {
      const Vec2 u = p.velocity(x, t);
      CHECK(std::abs(u[0]) < 1e-14);
      CHECK(std::abs(u[1]) < 1e-14);
    }
  }
}

void check_divergence_free(const FlowProblem& p) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Vec2 x{unit(rng), unit(rng)};
    CHECK(std::abs(fd_divergence(p, x, unit(rng) * 2.0)) < 1e-9);
  }
}

void check_gradient(const FlowProblem& p) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = 1e-6;
  for (int k = 0; k < 50; ++k) {
    const Vec2 x{0.05 + 0.9 * unit(rng), 0.05 + 0.9 * unit(rng)};
    const double t = unit(rng);
    const kv::Mat2 g = p.velocity_gradient(x, t);
    for (int c = 0; c < 2; ++c) {
      const double dx =
          (p.velocity({x[0] + h, x[1]}, t)[c] - p.velocity({x[0] - h, x[1]}, t)[c]) / (2 * h);
      const double dy =
          (p.velocity({x[0], x[1] + h}, t)[c] - p.velocity({x[0], x[1] - h}, t)[c]) / (2 * h);
      CHECK(g[c][0] == doctest::Approx(dx).epsilon(1e-6).scale(1.0));
      CHECK(g[c][1] == doctest::Approx(dy).epsilon(1e-6).scale(1.0));
    }
  }
}

}  // namespace

TEST_CASE("forced vortex matches its stated point values") {
  const FlowProblem p = kv::forced_polynomial_vortex(1.0, 1.0);
  CHECK(p.velocity({0.5, 0.25}, 0.0)[0] == doctest::Approx(0.05859375).epsilon(1e-13));
  CHECK(p.pressure({0.5, 0.5}, 0.0) == doctest::Approx(10.0).epsilon(1e-13));

  const FlowProblem sine = kv::decaying_sine_vortex();
  CHECK(sine.velocity({1.0 / 12, 1.0 / 12}, 0.0)[0] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("all problems satisfy walls, solenoidality and stated gradients") {
  for (const FlowProblem& p :
       {kv::forced_polynomial_vortex(1.0, 1.0), kv::decaying_polynomial_vortex(),
        kv::decaying_sine_vortex(), kv::steady_stokes_vortex(1.0)}) {
    CAPTURE(p.name);
    check_walls(p);
    check_divergence_free(p);
    check_gradient(p);
  }
}

TEST_CASE("hand-derived forcing is consistent with the PDE across kappa") {
  for (double kappa : {0.0, 1e-3, 1.0}) {
    CAPTURE(kappa);
    const FlowProblem p = kv::forced_polynomial_vortex(1.0, kappa);
    CHECK(kv::forcing_consistency_check(p, 1000, 2024) < 1e-8);
  }
}

TEST_CASE("forcing consistency covers nonunit viscosity and the steady problem") {
  CHECK(kv::forcing_consistency_check(kv::forced_polynomial_vortex(0.3, 0.7), 500, 7) <
        1e-8);
  CHECK(kv::forcing_consistency_check(kv::steady_stokes_vortex(2.0), 500, 11) < 1e-8);
}

TEST_CASE("consistency check requires an exact solution") {
  CHECK_THROWS_AS(kv::forcing_consistency_check(kv::decaying_sine_vortex(), 10, 1),
                  kv::ConfigError);
}
