#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "kv/assembly.hpp"
#include "kv/fem.hpp"
#include "kv/mesh.hpp"
#include "kv/problems.hpp"
#include "kv/solver.hpp"

namespace kv {

struct ModelConfig {
  double nu = 1.0;     // viscosity, > 0
  double kappa = 1.0;  // retardation time, >= 0
};

// Uniform grid t_n = n k with N k = T exactly.
struct TimeGrid {
  double T = 1.0;
  int steps = 1;

  double k() const { return T / steps; }
  double time(int n) const { return T * n / steps; }
};

struct PicardConfig {
  double tol = 1e-10;  // relative update in the velocity coefficients
  int max_iters = 50;
};

enum class InitialData {
  l2_projection,        // divergence-constrained L2 projection (default)
  nodal_interpolation,  // P2 interpolant, not discretely divergence free
};

struct FlowState {
  double t = 0.0;
  std::vector<double> velocity;  // full interleaved coefficients, walls zero
  std::vector<double> pressure;  // one value per triangle, zero mean
};

struct StepDiagnostics {
  double t = 0.0;
  int picard_iters = 0;
  double picard_update = 0.0;  // last relative update
  double norm_u = 0.0;         // sqrt(U' M U)
  double norm_grad_u = 0.0;    // sqrt(U' A U)
  double energy = 0.0;         // U' M U + kappa U' A U
  double div_residual = 0.0;   // max |(div u_h, 1)_K|
};

struct RunResult {
  std::vector<StepDiagnostics> trace;  // one entry per step, t = k .. T
  StepDiagnostics initial_diagnostics;
  FlowState initial;
  FlowState final_state;
};

// Implicit Euler time stepper for the damped flow model
//   u_t + (u.grad)u - kappa lap(u_t) - nu lap(u) + grad p = f,  div u = 0,
// discretized with quadratic velocities and constant pressures. Each step
// solves the fully implicit system by Picard iteration on the convecting
// field, starting from the previous velocity; every iterate refactorizes the
// saddle matrix with the convection rebuilt about the latest iterate.
class FlowSimulator {
 public:
  FlowSimulator(const TriangleMesh& mesh, ModelConfig model, TimeGrid grid,
                PicardConfig picard = {},
                std::function<Vec2(const Vec2&, double)> forcing = nullptr);
  ~FlowSimulator();

  const DofLayout& layout() const;
  const SparseMatrix& mass() const;
  const SparseMatrix& stiffness() const;

  // State at t = 0 from the given initial velocity field.
  FlowState prepare_initial(const std::function<Vec2(const Vec2&)>& u0,
                            InitialData mode = InitialData::l2_projection) const;

  // Advances state by one step of size k. Throws SolverError when the Picard
  // iteration fails to converge within the configured budget.
  StepDiagnostics step(FlowState& state);

  // Full trajectory from t = 0 to T.
  RunResult run(const std::function<Vec2(const Vec2&)>& u0,
                InitialData mode = InitialData::l2_projection);

  StepDiagnostics diagnostics_for(const FlowState& state) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kv
