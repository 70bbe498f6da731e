#include "selftest.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kv/analysis.hpp"
#include "kv/assembly.hpp"
#include "kv/problems.hpp"
#include "kv/quadrature.hpp"
#include "kv/solver.hpp"
#include "oracle.hpp"

namespace kvflow {

namespace {

struct Reporter {
  std::ostream& out;
  bool all_passed = true;

  void check(const std::string& name, bool passed, const std::string& detail) {
    all_passed = all_passed && passed;
    out << (passed ? "ok   " : "FAIL ") << name;
    if (!detail.empty()) out << " (" << detail << ")";
    out << "\n";
  }
};

std::string deviation(double value, double bound) {
  std::ostringstream s;
  s << "max deviation " << value << ", bound " << bound;
  return s.str();
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_quadrature(Reporter& r) {
  // Reference-triangle monomial moments have the closed form p! q! / (p+q+2)!.
  double worst = 0.0;
  for (int degree = 1; degree <= 10; ++degree) {
    const auto& rule = kv::gauss_rule(degree);
    for (int p = 0; p + 0 <= degree; ++p)
      for (int q = 0; p + q <= degree; ++q) {
        double integral = 0.0;
        for (int i = 0; i < rule.size(); ++i)
          integral += rule.weights[i] * std::pow(rule.points[i][1], p) *
                      std::pow(rule.points[i][2], q);
        const double exact = factorial(p) * factorial(q) / factorial(p + q + 2);
        worst = std::max(worst, std::abs(integral - exact));
      }
  }
  r.check("quadrature moments, degrees 1-10", worst < 1e-13, deviation(worst, 1e-13));
}

std::vector<double> random_velocity(int size, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(size);
  for (double& x : v) x = dist(rng);
  return v;
}

void check_assembly(Reporter& r) {
  double worst_mass = 0.0, worst_stiffness = 0.0, worst_divergence = 0.0,
         worst_convection = 0.0;
  for (int n : {1, 2}) {
    const auto mesh = kv::build_structured(n);
    const auto layout = kv::make_dof_layout(mesh);
    const auto w = random_velocity(layout.n_velocity(), 7u + n);

    worst_mass = std::max(
        worst_mass,
        kv::oracle::max_abs_difference(
            kv::oracle::to_dense(kv::assemble_mass(mesh, layout)), kv::oracle::mass(mesh)));
    worst_stiffness = std::max(
        worst_stiffness,
        kv::oracle::max_abs_difference(
            kv::oracle::to_dense(kv::assemble_stiffness(mesh, layout)),
            kv::oracle::stiffness(mesh)));
    worst_divergence = std::max(
        worst_divergence,
        kv::oracle::max_abs_difference(
            kv::oracle::to_dense(kv::assemble_divergence(mesh, layout)),
            kv::oracle::divergence(mesh)));
    worst_convection = std::max(
        worst_convection,
        kv::oracle::max_abs_difference(
            kv::oracle::to_dense(kv::assemble_convection(mesh, layout, w)),
            kv::oracle::convection(mesh, w)));
  }
  r.check("mass matrix vs dense oracle, n <= 2", worst_mass < 1e-13,
          deviation(worst_mass, 1e-13));
  r.check("stiffness matrix vs dense oracle, n <= 2", worst_stiffness < 1e-13,
          deviation(worst_stiffness, 1e-13));
  r.check("divergence matrix vs dense oracle, n <= 2", worst_divergence < 1e-13,
          deviation(worst_divergence, 1e-13));
  r.check("convection matrix vs dense oracle, n <= 2", worst_convection < 1e-13,
          deviation(worst_convection, 1e-13));
}

void check_solver(Reporter& r) {
  const auto mesh = kv::build_structured(2);
  const auto layout = kv::make_dof_layout(mesh);
  const auto red = kv::velocity_dirichlet(mesh, layout);
  const auto mass = red.reduce_square(kv::assemble_mass(mesh, layout));
  const auto stiffness = red.reduce_square(kv::assemble_stiffness(mesh, layout));
  const double coeffs[] = {1.0, 1.0};
  const kv::SparseMatrix* mats[] = {&mass, &stiffness};
  const auto system = kv::SparseMatrix::combine(coeffs, mats);

  const auto rhs = random_velocity(system.rows(), 11u);
  const auto sparse_x = kv::Factorization(system).solve(rhs);
  const auto dense_x = kv::oracle::solve_dense(kv::oracle::to_dense(system), rhs);

  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < sparse_x.size(); ++i) {
    diff = std::max(diff, std::abs(sparse_x[i] - dense_x[i]));
    scale = std::max(scale, std::abs(dense_x[i]));
  }
  const double rel = diff / scale;
  r.check("sparse solve vs dense oracle, n = 2", rel < 1e-11, deviation(rel, 1e-11));
}

void check_antisymmetry(Reporter& r) {
  const auto mesh = kv::build_structured(2);
  const auto layout = kv::make_dof_layout(mesh);
  const auto stiffness = kv::assemble_stiffness(mesh, layout);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(layout.n_velocity()), w(layout.n_velocity());
    for (double& x : v) x = dist(rng);
    for (double& x : w) x = dist(rng);
    for (int d : layout.boundary_velocity_dofs()) v[d] = w[d] = 0.0;

    const auto convection = kv::assemble_convection(mesh, layout, w);
    double v2 = 0.0;
    for (double x : v) v2 += x * x;
    const double grad_w = std::sqrt(std::max(0.0, stiffness.inner(w, w)));
    const double bound = 1e-12 * v2 * std::max(grad_w, 1.0);
    worst = std::max(worst, std::abs(convection.inner(v, v)) / bound);
  }
  r.check("trilinear antisymmetry, 20 random pairs", worst < 1.0,
          deviation(worst, 1.0) + " (scaled)");
}

void check_rates(Reporter& r) {
  const std::vector<double> errors{0.430939, 0.203398, 0.065544, 0.017502};
  const auto rates = kv::convergence_rates(errors);
  const double expected[] = {1.0832, 1.6338, 1.9049};
  bool passed = rates.size() == 3;
  double worst = 0.0;
  for (std::size_t i = 0; passed && i < 3; ++i)
    worst = std::max(worst, std::abs(rates[i] - expected[i]));
  passed = passed && worst < 5e-5;
  r.check("rate arithmetic on a fixed error quadruple", passed,
          deviation(worst, 5e-5));
}

void check_forcing(Reporter& r) {
  double worst = 0.0;
  for (double kappa : {0.0, 1e-3, 1.0}) {
    const auto problem = kv::forced_polynomial_vortex(1.0, kappa);
    worst = std::max(worst, kv::forcing_consistency_check(problem, 200, 2024));
  }
  r.check("manufactured forcing consistency, 200 samples", worst < 1e-8,
          deviation(worst, 1e-8));
}

}  // namespace

bool run_selftest(std::ostream& out) {
  Reporter r{out};
  check_quadrature(r);
  check_assembly(r);
  check_solver(r);
  check_antisymmetry(r);
  check_rates(r);
  check_forcing(r);
  out << (r.all_passed ? "selftest passed" : "selftest FAILED") << "\n";
  return r.all_passed;
}

}  // namespace kvflow
