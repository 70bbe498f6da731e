#include "kv/assembly.hpp"

#include <algorithm>
#include <numeric>

#include "kv/errors.hpp"
#include "kv/quadrature.hpp"

namespace kv {

namespace {

constexpr int kBilinearDegree = 4;    // exact for P2 x P2
constexpr int kConvectionDegree = 5;  // exact for P2 x grad(P2) x P2
constexpr int kFunctionalDegree = 10;

// Assembles a scalar 6x6 element kernel over every triangle, scattering into
// one or both velocity components. Emitting the full stencil (zeros included)
// keeps the pattern of every operator built here identical.
template <typename Kernel>
SparseMatrix assemble_p2(const TriangleMesh& mesh, const DofLayout& layout, bool vector,
                         Kernel&& kernel) {
  const int n = vector ? layout.n_velocity() : layout.n_velocity_scalar();
  std::vector<Triplet> entries;
  entries.reserve(mesh.n_triangles() * (vector ? 72 : 36));

  std::array<std::array<double, 6>, 6> local{};
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    for (auto& row : local) row.fill(0.0);
    kernel(t, local);
    for (int i = 0; i < 6; ++i) {
      const int si = layout.scalar_dof(t, i);
      for (int j = 0; j < 6; ++j) {
        const int sj = layout.scalar_dof(t, j);
        if (vector) {
          entries.push_back({2 * si, 2 * sj, local[i][j]});
          entries.push_back({2 * si + 1, 2 * sj + 1, local[i][j]});
        } else {
          entries.push_back({si, sj, local[i][j]});
        }
      }
    }
  }
  return SparseMatrix(n, n, std::move(entries));
}

void mass_kernel(const TriangleMesh& mesh, int t, std::array<std::array<double, 6>, 6>& out) {
  const auto& rule = gauss_rule(kBilinearDegree);
  const double scale = 2.0 * mesh.area(t);
  for (int q = 0; q < rule.size(); ++q) {
    const P2Basis basis = p2_basis(rule.points[q]);
    const double wq = scale * rule.weights[q];
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) out[i][j] += wq * basis.value[i] * basis.value[j];
  }
}

void stiffness_kernel(const TriangleMesh& mesh, int t,
                      std::array<std::array<double, 6>, 6>& out) {
  const auto& rule = gauss_rule(kBilinearDegree);
  const TriangleGeometry geom = triangle_geometry(mesh, t);
  const double scale = 2.0 * geom.area;
  for (int q = 0; q < rule.size(); ++q) {
    const auto grads = p2_gradients(p2_basis(rule.points[q]), geom);
    const double wq = scale * rule.weights[q];
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        out[i][j] += wq * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
  }
}

}  // namespace

SparseMatrix assemble_mass(const TriangleMesh& mesh, const DofLayout& layout) {
  return assemble_p2(mesh, layout, true,
                     [&](int t, auto& local) { mass_kernel(mesh, t, local); });
}

SparseMatrix assemble_stiffness(const TriangleMesh& mesh, const DofLayout& layout) {
  return assemble_p2(mesh, layout, true,
                     [&](int t, auto& local) { stiffness_kernel(mesh, t, local); });
}

SparseMatrix assemble_scalar_mass(const TriangleMesh& mesh, const DofLayout& layout) {
  return assemble_p2(mesh, layout, false,
                     [&](int t, auto& local) { mass_kernel(mesh, t, local); });
}

SparseMatrix assemble_scalar_stiffness(const TriangleMesh& mesh, const DofLayout& layout) {
  return assemble_p2(mesh, layout, false,
                     [&](int t, auto& local) { stiffness_kernel(mesh, t, local); });
}

SparseMatrix assemble_divergence(const TriangleMesh& mesh, const DofLayout& layout) {
  const auto& rule = gauss_rule(kBilinearDegree);
  std::vector<Triplet> entries;
  entries.reserve(mesh.n_triangles() * 12);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const TriangleGeometry geom = triangle_geometry(mesh, t);
    const double scale = 2.0 * geom.area;
    std::array<Vec2, 6> integral{};  // integral of grad(phi_i) over the triangle
    for (int q = 0; q < rule.size(); ++q) {
      const auto grads = p2_gradients(p2_basis(rule.points[q]), geom);
      for (int i = 0; i < 6; ++i) {
        integral[i][0] += scale * rule.weights[q] * grads[i][0];
        integral[i][1] += scale * rule.weights[q] * grads[i][1];
      }
    }
    for (int i = 0; i < 6; ++i) {
      const int s = layout.scalar_dof(t, i);
      entries.push_back({t, 2 * s, integral[i][0]});
      entries.push_back({t, 2 * s + 1, integral[i][1]});
    }
  }
  return SparseMatrix(layout.n_pressure(), layout.n_velocity(), std::move(entries));
}

SparseMatrix assemble_convection(const TriangleMesh& mesh, const DofLayout& layout,
                                 std::span<const double> w) {
  if (static_cast<int>(w.size()) != layout.n_velocity())
    throw ConfigError("assemble_convection: bad coefficient size");
  const auto& rule = gauss_rule(kConvectionDegree);
  return assemble_p2(mesh, layout, true, [&](int t, auto& local) {
    const TriangleGeometry geom = triangle_geometry(mesh, t);
    const double scale = 2.0 * geom.area;
    std::array<std::array<double, 6>, 6> c{};  // c[i][j] = (w.grad phi_j, phi_i)
    for (int q = 0; q < rule.size(); ++q) {
      const P2Basis basis = p2_basis(rule.points[q]);
      const auto grads = p2_gradients(basis, geom);
      Vec2 wq{};
      for (int i = 0; i < 6; ++i) {
        const int s = layout.scalar_dof(t, i);
        wq[0] += w[2 * s] * basis.value[i];
        wq[1] += w[2 * s + 1] * basis.value[i];
      }
      const double weight = scale * rule.weights[q];
      for (int j = 0; j < 6; ++j) {
        const double conv = weight * (wq[0] * grads[j][0] + wq[1] * grads[j][1]);
        for (int i = 0; i < 6; ++i) c[i][j] += conv * basis.value[i];
      }
    }
    // Skew part only: phi' N(w) u = 1/2 (w.grad u, phi) - 1/2 (w.grad phi, u).
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) local[i][j] = 0.5 * (c[i][j] - c[j][i]);
  });
}

std::vector<double> assemble_load(const TriangleMesh& mesh, const DofLayout& layout,
                                  const std::function<Vec2(const Vec2&)>& f) {
  const auto& rule = gauss_rule(kFunctionalDegree);
  std::vector<double> load(layout.n_velocity(), 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double scale = 2.0 * mesh.area(t);
    for (int q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const Vec2 x = {l[0] * mesh.vertices[tri[0]][0] + l[1] * mesh.vertices[tri[1]][0] +
                          l[2] * mesh.vertices[tri[2]][0],
                      l[0] * mesh.vertices[tri[0]][1] + l[1] * mesh.vertices[tri[1]][1] +
                          l[2] * mesh.vertices[tri[2]][1]};
      const Vec2 fx = f(x);
      const P2Basis basis = p2_basis(l);
      const double wq = scale * rule.weights[q];
      for (int i = 0; i < 6; ++i) {
        const int s = layout.scalar_dof(t, i);
        load[2 * s] += wq * fx[0] * basis.value[i];
        load[2 * s + 1] += wq * fx[1] * basis.value[i];
      }
    }
  }
  return load;
}

SparseMatrix DirichletReduction::reduce_square(const SparseMatrix& m) const {
  return m.select(free_dofs, free_dofs);
}

SparseMatrix DirichletReduction::reduce_columns(const SparseMatrix& m) const {
  std::vector<int> all_rows(m.rows());
  std::iota(all_rows.begin(), all_rows.end(), 0);
  return m.select(all_rows, free_dofs);
}

std::vector<double> DirichletReduction::restrict_vector(std::span<const double> full) const {
  std::vector<double> out(free_dofs.size());
  for (std::size_t i = 0; i < free_dofs.size(); ++i) out[i] = full[free_dofs[i]];
  return out;
}

std::vector<double> DirichletReduction::expand_vector(std::span<const double> reduced,
                                                      int full_size) const {
  std::vector<double> out(full_size, 0.0);
  for (std::size_t i = 0; i < free_dofs.size(); ++i) out[free_dofs[i]] = reduced[i];
  return out;
}

DirichletReduction apply_dirichlet(int n_dofs, std::span<const int> constrained_dofs) {
  std::vector<std::uint8_t> constrained(n_dofs, 0);
  for (int d : constrained_dofs) {
    if (d < 0 || d >= n_dofs) throw ConfigError("apply_dirichlet: dof out of range");
    constrained[d] = 1;
  }
  DirichletReduction red;
  red.full_to_free.assign(n_dofs, -1);
  for (int d = 0; d < n_dofs; ++d) {
    if (!constrained[d]) {
      red.full_to_free[d] = static_cast<int>(red.free_dofs.size());
      red.free_dofs.push_back(d);
    }
  }
  if (red.free_dofs.empty())
    throw ConfigError("apply_dirichlet: elimination removed every dof");
  return red;
}

DirichletReduction velocity_dirichlet(const TriangleMesh& mesh, const DofLayout& layout) {
  const auto constrained = layout.boundary_velocity_dofs();
  return apply_dirichlet(layout.n_velocity(), constrained);
}

}  // namespace kv
