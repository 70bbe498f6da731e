#include "kv/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kv/errors.hpp"

namespace kv {

struct FlowSimulator::Impl {
  TriangleMesh mesh;
  ModelConfig model;
  TimeGrid grid;
  PicardConfig picard;
  std::function<Vec2(const Vec2&, double)> forcing;

  DofLayout layout;
  DirichletReduction red;
  SparseMatrix mass_full;       // vector operators on all velocity dofs
  SparseMatrix stiffness_full;
  SparseMatrix divergence_full;
  SparseMatrix mass;            // reduced to the no-slip space
  SparseMatrix stiffness;
  SparseMatrix divergence;
  std::vector<double> areas;
  SaddleSolver saddle;          // pattern fixed once, values swapped per iterate

  Impl(const TriangleMesh& m, ModelConfig mc, TimeGrid tg, PicardConfig pc,
       std::function<Vec2(const Vec2&, double)> f)
      : mesh(m),
        model(mc),
        grid(tg),
        picard(pc),
        forcing(std::move(f)),
        layout(make_dof_layout(mesh)),
        red(velocity_dirichlet(mesh, layout)),
        mass_full(assemble_mass(mesh, layout)),
        stiffness_full(assemble_stiffness(mesh, layout)),
        divergence_full(assemble_divergence(mesh, layout)),
        mass(red.reduce_square(mass_full)),
        stiffness(red.reduce_square(stiffness_full)),
        divergence(red.reduce_columns(divergence_full)),
        areas(make_areas(mesh)),
        saddle(initial_operator(), divergence, areas) {
    if (model.nu <= 0) throw ConfigError("FlowSimulator: nu must be positive");
    if (model.kappa < 0) throw ConfigError("FlowSimulator: kappa must be nonnegative");
    if (grid.steps < 1 || grid.T <= 0) throw ConfigError("FlowSimulator: bad time grid");
    if (picard.tol <= 0 || picard.max_iters < 1)
      throw ConfigError("FlowSimulator: bad Picard configuration");
  }

  static std::vector<double> make_areas(const TriangleMesh& m) {
    std::vector<double> a(m.n_triangles());
    for (int t = 0; t < m.n_triangles(); ++t) a[t] = m.area(t);
    return a;
  }

  // Placeholder with the shared sparsity pattern, used to analyze the saddle
  // matrix once before the first real factorization.
  SparseMatrix initial_operator() {
    const std::vector<double> zero(layout.n_velocity(), 0.0);
    SparseMatrix n0 = red.reduce_square(assemble_convection(mesh, layout, zero));
    const double coeffs[] = {1.0, 1.0, 1.0};
    const SparseMatrix* mats[] = {&mass, &stiffness, &n0};
    return SparseMatrix::combine(coeffs, mats);
  }

  SparseMatrix implicit_operator(std::span<const double> w_free) {
    const std::vector<double> w_full = red.expand_vector(w_free, layout.n_velocity());
    const SparseMatrix conv = red.reduce_square(assemble_convection(mesh, layout, w_full));
    const double k = grid.k();
    const double coeffs[] = {1.0 / k, model.kappa / k + model.nu, 1.0};
    const SparseMatrix* mats[] = {&mass, &stiffness, &conv};
    return SparseMatrix::combine(coeffs, mats);
  }

  StepDiagnostics diagnostics(const FlowState& state, int iters, double update) const {
    StepDiagnostics d;
    d.t = state.t;
    d.picard_iters = iters;
    d.picard_update = update;
    const double m2 = mass_full.inner(state.velocity, state.velocity);
    const double a2 = stiffness_full.inner(state.velocity, state.velocity);
    d.norm_u = std::sqrt(std::max(0.0, m2));
    d.norm_grad_u = std::sqrt(std::max(0.0, a2));
    d.energy = m2 + model.kappa * a2;
    const auto div = divergence_full.multiply(state.velocity);
    for (double v : div) d.div_residual = std::max(d.div_residual, std::abs(v));
    return d;
  }
};

FlowSimulator::FlowSimulator(const TriangleMesh& mesh, ModelConfig model, TimeGrid grid,
                             PicardConfig picard,
                             std::function<Vec2(const Vec2&, double)> forcing)
    : impl_(std::make_unique<Impl>(mesh, model, grid, picard, std::move(forcing))) {}

FlowSimulator::~FlowSimulator() = default;

const DofLayout& FlowSimulator::layout() const { return impl_->layout; }
const SparseMatrix& FlowSimulator::mass() const { return impl_->mass_full; }
const SparseMatrix& FlowSimulator::stiffness() const { return impl_->stiffness_full; }

FlowState FlowSimulator::prepare_initial(const std::function<Vec2(const Vec2&)>& u0,
                                         InitialData mode) const {
  auto& im = *impl_;
  FlowState state;
  state.t = 0.0;
  state.pressure.assign(im.layout.n_pressure(), 0.0);

  if (mode == InitialData::nodal_interpolation) {
    state.velocity = interpolate_velocity(im.mesh, im.layout, u0);
    for (int d : im.layout.boundary_velocity_dofs()) state.velocity[d] = 0.0;
    return state;
  }

  // L2 projection constrained to the discretely divergence-free subspace:
  //   M U + B' mu = (u0, phi),  B U = 0.
  const auto load = assemble_load(im.mesh, im.layout, u0);
  const auto rhs_u = im.red.restrict_vector(load);
  const std::vector<double> rhs_p(im.layout.n_pressure(), 0.0);
  SaddleSolver projector(im.mass, im.divergence, im.areas);
  const SaddleSolution sol = projector.solve(rhs_u, rhs_p);
  state.velocity = im.red.expand_vector(sol.velocity, im.layout.n_velocity());
  return state;
}

StepDiagnostics FlowSimulator::step(FlowState& state) {
  auto& im = *impl_;
  const double k = im.grid.k();
  const double t_new = state.t + k;

  // rhs accumulates (1/k)(M + kappa A) U_old and the load at the new time.
  const auto u_old = im.red.restrict_vector(state.velocity);
  std::vector<double> rhs_u(u_old.size(), 0.0);
  {
    const auto mu = im.mass.multiply(u_old);
    const auto au = im.stiffness.multiply(u_old);
    for (std::size_t i = 0; i < rhs_u.size(); ++i)
      rhs_u[i] = (mu[i] + im.model.kappa * au[i]) / k;
  }
  if (im.forcing) {
    const auto load = assemble_load(im.mesh, im.layout,
                                    [&](const Vec2& x) { return im.forcing(x, t_new); });
    const auto load_red = im.red.restrict_vector(load);
    for (std::size_t i = 0; i < rhs_u.size(); ++i) rhs_u[i] += load_red[i];
  }
  const std::vector<double> rhs_p(im.layout.n_pressure(), 0.0);

  // Picard iteration on the convecting field, starting from U_old. Each
  // iterate rebuilds the convection and refactorizes.
  std::vector<double> w = u_old;
  SaddleSolution sol;
  double update = 0.0;
  int iters = 0;
  bool converged = false;
  for (int m = 1; m <= im.picard.max_iters; ++m) {
    im.saddle.refactorize(im.implicit_operator(w));
    sol = im.saddle.solve(rhs_u, rhs_p);

    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = sol.velocity[i] - w[i];
      diff2 += d * d;
      norm2 += sol.velocity[i] * sol.velocity[i];
    }
    update = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-300);
    w = sol.velocity;
    iters = m;
    if (update <= im.picard.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "FlowSimulator::step: Picard iteration did not reach tolerance "
        << im.picard.tol << " in " << im.picard.max_iters
        << " iterations at t = " << t_new;
    throw SolverError(msg.str());
  }

  state.t = t_new;
  state.velocity = im.red.expand_vector(sol.velocity, im.layout.n_velocity());
  state.pressure = std::move(sol.pressure);
  return im.diagnostics(state, iters, update);
}

RunResult FlowSimulator::run(const std::function<Vec2(const Vec2&)>& u0, InitialData mode) {
  auto& im = *impl_;
  RunResult result;
  FlowState state = prepare_initial(u0, mode);
  result.initial = state;
  result.initial_diagnostics = im.diagnostics(state, 0, 0.0);
  result.trace.reserve(im.grid.steps);
  for (int n = 1; n <= im.grid.steps; ++n) {
    StepDiagnostics d = step(state);
    state.t = im.grid.time(n);  // pin against drift in repeated addition
    d.t = state.t;
    result.trace.push_back(d);
  }
  result.final_state = std::move(state);
  return result;
}

StepDiagnostics FlowSimulator::diagnostics_for(const FlowState& state) const {
  return impl_->diagnostics(state, 0, 0.0);
}

}  // namespace kv
