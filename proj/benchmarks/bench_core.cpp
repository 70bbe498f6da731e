// Microbenchmarks for the hot paths of a time step: operator assembly,
// saddle-point factorization (first-time and value-swap refactorization),
// triangular solves, and a complete Picard time step. Mesh sizes follow the
// convergence ladder; n is the number of grid cells per side.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "kv/assembly.hpp"
#include "kv/mesh.hpp"
#include "kv/problems.hpp"
#include "kv/solver.hpp"
#include "kv/sparse.hpp"
#include "kv/stepper.hpp"

namespace {

std::vector<double> random_vector(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<double> v(size);
  for (double& x : v) x = coeff(rng);
  return v;
}

// Everything the implicit step operates on, reduced to the no-slip space the
// same way the time stepper does it.
struct ReducedSystem {
  kv::TriangleMesh mesh;
  kv::DofLayout layout;
  kv::DirichletReduction red;
  kv::SparseMatrix mass, stiffness, divergence;
  std::vector<double> areas;
  kv::SparseMatrix implicit_matrix;

  explicit ReducedSystem(int n)
      : mesh(kv::build_structured(n)),
        layout(kv::make_dof_layout(mesh)),
        red(kv::velocity_dirichlet(mesh, layout)),
        mass(red.reduce_square(kv::assemble_mass(mesh, layout))),
        stiffness(red.reduce_square(kv::assemble_stiffness(mesh, layout))),
        divergence(red.reduce_columns(kv::assemble_divergence(mesh, layout))) {
    areas.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) areas[t] = mesh.area(t);
    const auto w = random_vector(layout.n_velocity(), 42);
    const kv::SparseMatrix convection =
        red.reduce_square(kv::assemble_convection(mesh, layout, w));
    const double k = 1.0 / (n * n);
    const double coeffs[] = {1.0 / k, 1.0 / k + 1.0, 1.0};
    const kv::SparseMatrix* mats[] = {&mass, &stiffness, &convection};
    implicit_matrix = kv::SparseMatrix::combine(coeffs, mats);
  }
};

}  // namespace

static void BM_AssembleMass(benchmark::State& state) {
  const kv::TriangleMesh mesh = kv::build_structured(state.range(0));
  const kv::DofLayout layout = kv::make_dof_layout(mesh);
  for (auto _ : state)
    benchmark::DoNotOptimize(kv::assemble_mass(mesh, layout));
}
BENCHMARK(BM_AssembleMass)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_AssembleConvection(benchmark::State& state) {
  const kv::TriangleMesh mesh = kv::build_structured(state.range(0));
  const kv::DofLayout layout = kv::make_dof_layout(mesh);
  const auto w = random_vector(layout.n_velocity(), 42);
  for (auto _ : state)
    benchmark::DoNotOptimize(kv::assemble_convection(mesh, layout, w));
}
BENCHMARK(BM_AssembleConvection)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_SaddleFactorize(benchmark::State& state) {
  const ReducedSystem sys(state.range(0));
  for (auto _ : state) {
    kv::SaddleSolver solver(sys.implicit_matrix, sys.divergence, sys.areas);
    benchmark::DoNotOptimize(&solver);
  }
}
BENCHMARK(BM_SaddleFactorize)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_SaddleRefactorize(benchmark::State& state) {
  const ReducedSystem sys(state.range(0));
  kv::SaddleSolver solver(sys.implicit_matrix, sys.divergence, sys.areas);
  for (auto _ : state) {
    solver.refactorize(sys.implicit_matrix);
    benchmark::DoNotOptimize(&solver);
  }
}
BENCHMARK(BM_SaddleRefactorize)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_SaddleSolve(benchmark::State& state) {
  const ReducedSystem sys(state.range(0));
  const kv::SaddleSolver solver(sys.implicit_matrix, sys.divergence, sys.areas);
  const auto rhs_u = random_vector(sys.implicit_matrix.rows(), 7);
  const std::vector<double> rhs_p(sys.divergence.rows(), 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(solver.solve(rhs_u, rhs_p));
}
BENCHMARK(BM_SaddleSolve)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

// One full backward-Euler step (Picard iteration to 1e-10) of the forced
// vortex, restarted from the projected initial state every iteration.
static void BM_FlowStep(benchmark::State& state) {
  const int n = state.range(0);
  const kv::FlowProblem problem = kv::forced_polynomial_vortex(1.0, 1.0);
  const kv::TriangleMesh mesh = kv::build_structured(n);
  kv::FlowSimulator sim(mesh, {problem.nu, problem.kappa},
                        {1.0, n * n}, {}, problem.forcing);
  const kv::FlowState initial = sim.prepare_initial(
      [&](const kv::Vec2& x) { return problem.velocity(x, 0.0); });
  for (auto _ : state) {
    kv::FlowState step_state = initial;
    benchmark::DoNotOptimize(sim.step(step_state));
  }
}
BENCHMARK(BM_FlowStep)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
