#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kv/fem.hpp"
#include "kv/mesh.hpp"
#include "kv/stepper.hpp"

namespace kv {

// Reference fields an approximate state is measured against: either closed
// forms at a fixed time or a finer finite element solution.
struct ReferenceFields {
  std::function<Vec2(const Vec2&)> velocity;
  std::function<Mat2(const Vec2&)> velocity_gradient;
  std::function<double(const Vec2&)> pressure;  // optional
};

ReferenceFields reference_from_exact(const FlowProblem& problem, double t);
// Evaluates a solved state on another (typically finer) mesh by point
// location. Both meshes must cover the unit square.
ReferenceFields reference_from_state(const TriangleMesh& mesh, const DofLayout& layout,
                                     const FlowState& state);

struct ErrorNorms {
  double velocity_l2 = 0.0;
  double velocity_h1 = 0.0;       // full norm: sqrt(L2^2 + seminorm^2)
  double velocity_h1_semi = 0.0;
  double pressure_l2 = 0.0;       // after removing each field's mean
};

// Degree-10 quadrature over the computational mesh. Pressure errors compare
// mean-free fields, since the pressure is only determined up to constants.
ErrorNorms error_norms(const TriangleMesh& mesh, const DofLayout& layout,
                       const FlowState& state, const ReferenceFields& ref);

// rates[i] = log2(errors[i] / errors[i+1]); one entry shorter than errors.
std::vector<double> convergence_rates(std::span<const double> errors);

struct EnergyTrace {
  std::vector<double> t;
  std::vector<double> norm_u;
  std::vector<double> norm_grad_u;
  std::vector<double> energy;  // |u|^2 + kappa |grad u|^2
};

// Repackages a trajectory, including the initial state at t = 0.
EnergyTrace energy_trace(const RunResult& run);

struct DecayFit {
  double slope = 0.0;  // d log(y) / dt
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

// Least squares fit of log(values) over the window t in [t_begin, t_end].
DecayFit fit_log_linear(std::span<const double> t, std::span<const double> values,
                        double t_begin, double t_end);

// Smallest eigenvalue of the Dirichlet Laplacian on the scalar quadratic
// space, by inverse power iteration on A x = lambda M x. Converges to the
// domain's Poincare constant from above (2 pi^2 on the unit square).
double estimate_lambda1(const TriangleMesh& mesh, double rel_tol = 1e-8,
                        int max_iters = 10000);

struct AbsorbingBallReport {
  double alpha = 0.0;
  double rho0 = 0.0;            // ball radius in the energy norm
  double sup_energy_sqrt = 0.0;
  int entry_index = -1;         // first trace index inside the ball, -1 if never
  bool permanent = false;       // stays inside from entry_index on
};

// Checks the trajectory against the absorbing ball of radius
//   rho0^2 = f_bound^2 / (alpha nu lambda1),
// admissible for 0 < alpha < nu lambda1 / (4 (1 + kappa lambda1)). Throws
// ConfigError for alpha outside that range.
AbsorbingBallReport absorbing_ball_diagnostic(const EnergyTrace& trace, ModelConfig model,
                                              double alpha, double f_bound,
                                              double lambda1);

// sup_t ||f(., t)|| over sampled times, each norm by degree-10 quadrature.
double forcing_bound(const TriangleMesh& mesh,
                     const std::function<Vec2(const Vec2&, double)>& f, double t_end,
                     int time_samples);

}  // namespace kv
