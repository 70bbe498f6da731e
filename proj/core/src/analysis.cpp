#include "kv/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "kv/assembly.hpp"
#include "kv/errors.hpp"
#include "kv/quadrature.hpp"
#include "kv/solver.hpp"

namespace kv {

ReferenceFields reference_from_exact(const FlowProblem& problem, double t) {
  if (!problem.has_exact_solution)
    throw ConfigError("reference_from_exact: problem has no exact solution");
  ReferenceFields ref;
  ref.velocity = [=, v = problem.velocity](const Vec2& x) { return v(x, t); };
  ref.velocity_gradient = [=, g = problem.velocity_gradient](const Vec2& x) {
    return g(x, t);
  };
  if (problem.pressure)
    ref.pressure = [=, p = problem.pressure](const Vec2& x) { return p(x, t); };
  return ref;
}

ReferenceFields reference_from_state(const TriangleMesh& mesh, const DofLayout& layout,
                                     const FlowState& state) {
  // The lambdas copy the coefficient vectors and alias mesh/layout, which must
  // outlive the returned fields.
  ReferenceFields ref;
  ref.velocity = [&mesh, &layout, u = state.velocity](const Vec2& x) {
    return evaluate_velocity(mesh, layout, u, x);
  };
  ref.velocity_gradient = [&mesh, &layout, u = state.velocity](const Vec2& x) {
    const auto loc = locate_point(mesh, x);
    if (!loc) throw ConfigError("reference_from_state: point outside the mesh");
    return evaluate_velocity_gradient_at(mesh, layout, u, *loc);
  };
  ref.pressure = [&mesh, p = state.pressure](const Vec2& x) {
    const auto loc = locate_point(mesh, x);
    if (!loc) throw ConfigError("reference_from_state: point outside the mesh");
    return p[loc->triangle];
  };
  return ref;
}

ErrorNorms error_norms(const TriangleMesh& mesh, const DofLayout& layout,
                       const FlowState& state, const ReferenceFields& ref) {
  const auto& rule = gauss_rule(10);

  double l2 = 0.0, semi = 0.0;
  // Pressure differences enter through the variance identity
  // ||d - mean d||^2 = int d^2 - (int d)^2 / |Omega|, so a single pass
  // compares mean-free fields.
  double p_sq = 0.0, p_int = 0.0, domain = 0.0;

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const TriangleGeometry geom = triangle_geometry(mesh, t);
    const double scale = 2.0 * geom.area;
    domain += geom.area;
    const double p_h = state.pressure.empty() ? 0.0 : state.pressure[t];

    for (int q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const P2Basis basis = p2_basis(l);
      const auto grads = p2_gradients(basis, geom);
      const double wq = scale * rule.weights[q];

      const Vec2 x{l[0] * mesh.vertices[tri[0]][0] + l[1] * mesh.vertices[tri[1]][0] +
                       l[2] * mesh.vertices[tri[2]][0],
                   l[0] * mesh.vertices[tri[0]][1] + l[1] * mesh.vertices[tri[1]][1] +
                       l[2] * mesh.vertices[tri[2]][1]};

      Vec2 uh{};
      Mat2 gh{};
      for (int i = 0; i < 6; ++i) {
        const int s = layout.scalar_dof(t, i);
        for (int c = 0; c < 2; ++c) {
          uh[c] += state.velocity[2 * s + c] * basis.value[i];
          gh[c][0] += state.velocity[2 * s + c] * grads[i][0];
          gh[c][1] += state.velocity[2 * s + c] * grads[i][1];
        }
      }

      const Vec2 ue = ref.velocity(x);
      const Mat2 ge = ref.velocity_gradient(x);
      l2 += wq * ((uh[0] - ue[0]) * (uh[0] - ue[0]) + (uh[1] - ue[1]) * (uh[1] - ue[1]));
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          semi += wq * (gh[c][d] - ge[c][d]) * (gh[c][d] - ge[c][d]);

      if (ref.pressure) {
        const double diff = p_h - ref.pressure(x);
        p_sq += wq * diff * diff;
        p_int += wq * diff;
      }
    }
  }

  ErrorNorms norms;
  norms.velocity_l2 = std::sqrt(l2);
  norms.velocity_h1_semi = std::sqrt(semi);
  norms.velocity_h1 = std::sqrt(l2 + semi);
  if (ref.pressure)
    norms.pressure_l2 = std::sqrt(std::max(0.0, p_sq - p_int * p_int / domain));
  return norms;
}

std::vector<double> convergence_rates(std::span<const double> errors) {
  if (errors.size() < 2) return {};
  std::vector<double> rates;
  rates.reserve(errors.size() - 1);
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    rates.push_back(std::log2(errors[i] / errors[i + 1]));
  return rates;
}

EnergyTrace energy_trace(const RunResult& run) {
  EnergyTrace trace;
  const auto push = [&](const StepDiagnostics& d) {
    trace.t.push_back(d.t);
    trace.norm_u.push_back(d.norm_u);
    trace.norm_grad_u.push_back(d.norm_grad_u);
    trace.energy.push_back(d.energy);
  };
  push(run.initial_diagnostics);
  for (const auto& d : run.trace) push(d);
  return trace;
}

DecayFit fit_log_linear(std::span<const double> t, std::span<const double> values,
                        double t_begin, double t_end) {
  if (t.size() != values.size()) throw ConfigError("fit_log_linear: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_begin || t[i] > t_end) continue;
    if (values[i] <= 0.0)
      throw ConfigError("fit_log_linear: nonpositive value inside the fit window");
    xs.push_back(t[i]);
    ys.push_back(std::log(values[i]));
  }
  if (xs.size() < 2) throw ConfigError("fit_log_linear: fewer than two points in window");

  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  DecayFit fit;
  fit.points = static_cast<int>(xs.size());
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;

  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit_y = fit.intercept + fit.slope * xs[i];
    ss_res += (ys[i] - fit_y) * (ys[i] - fit_y);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double estimate_lambda1(const TriangleMesh& mesh, double rel_tol, int max_iters) {
  const DofLayout layout = make_dof_layout(mesh);
  const DirichletReduction red =
      apply_dirichlet(layout.n_velocity_scalar(), layout.boundary_scalar_dofs);
  const SparseMatrix a = red.reduce_square(assemble_scalar_stiffness(mesh, layout));
  const SparseMatrix m = red.reduce_square(assemble_scalar_mass(mesh, layout));
  const Factorization lu(a);

  // Inverse power iteration on A x = lambda M x with Rayleigh quotients on
  // M-normalized iterates.
  std::vector<double> x(a.rows(), 1.0);
  {
    const double nrm = std::sqrt(m.inner(x, x));
    for (double& v : x) v /= nrm;
  }
  double lambda = a.inner(x, x);
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> y = lu.solve(m.multiply(x));
    const double nrm = std::sqrt(m.inner(y, y));
    for (double& v : y) v /= nrm;
    const double next = a.inner(y, y);
    const bool done = std::abs(next - lambda) <= rel_tol * std::abs(next);
    lambda = next;
    x = std::move(y);
    if (done) return lambda;
  }
  throw SolverError("estimate_lambda1: inverse iteration did not converge");
}

AbsorbingBallReport absorbing_ball_diagnostic(const EnergyTrace& trace, ModelConfig model,
                                              double alpha, double f_bound,
                                              double lambda1) {
  const double alpha_max = model.nu * lambda1 / (4.0 * (1.0 + model.kappa * lambda1));
  if (!(alpha > 0.0) || !(alpha < alpha_max))
    throw ConfigError("absorbing_ball_diagnostic: alpha outside (0, nu lambda1 / (4 (1 + kappa lambda1)))");
  if (trace.energy.empty()) throw ConfigError("absorbing_ball_diagnostic: empty trace");

  AbsorbingBallReport report;
  report.alpha = alpha;
  report.rho0 = f_bound / std::sqrt(alpha * model.nu * lambda1);

  const double rho0_sq = report.rho0 * report.rho0;
  double sup_energy = 0.0;
  for (std::size_t i = 0; i < trace.energy.size(); ++i) {
    sup_energy = std::max(sup_energy, trace.energy[i]);
    if (report.entry_index < 0 && trace.energy[i] <= rho0_sq)
      report.entry_index = static_cast<int>(i);
  }
  report.sup_energy_sqrt = std::sqrt(sup_energy);
  if (report.entry_index >= 0) {
    report.permanent = true;
    for (std::size_t i = report.entry_index; i < trace.energy.size(); ++i)
      if (trace.energy[i] > rho0_sq) report.permanent = false;
  }
  return report;
}

double forcing_bound(const TriangleMesh& mesh,
                     const std::function<Vec2(const Vec2&, double)>& f, double t_end,
                     int time_samples) {
  if (!f || time_samples < 1) throw ConfigError("forcing_bound: bad arguments");
  const auto& rule = gauss_rule(10);
  double sup = 0.0;
  for (int s = 0; s <= time_samples; ++s) {
    const double t = t_end * s / time_samples;
    double norm_sq = 0.0;
    for (int tr = 0; tr < mesh.n_triangles(); ++tr) {
      const auto& tri = mesh.triangles[tr];
      const double scale = 2.0 * mesh.area(tr);
      for (int q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        const Vec2 x{l[0] * mesh.vertices[tri[0]][0] + l[1] * mesh.vertices[tri[1]][0] +
                         l[2] * mesh.vertices[tri[2]][0],
                     l[0] * mesh.vertices[tri[0]][1] + l[1] * mesh.vertices[tri[1]][1] +
                         l[2] * mesh.vertices[tri[2]][1]};
        const Vec2 fx = f(x, t);
        norm_sq += scale * rule.weights[q] * (fx[0] * fx[0] + fx[1] * fx[1]);
      }
    }
    sup = std::max(sup, std::sqrt(norm_sq));
  }
  return sup;
}

}  // namespace kv
