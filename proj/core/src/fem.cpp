#include "kv/fem.hpp"

#include <algorithm>
#include <cmath>

#include "kv/errors.hpp"

namespace kv {

P2Basis p2_basis(const std::array<double, 3>& lambda) {
  P2Basis b;
  const double l0 = lambda[0], l1 = lambda[1], l2 = lambda[2];
  b.value = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
             4 * l1 * l2,       4 * l2 * l0,       4 * l0 * l1};
  b.dlambda = {{{4 * l0 - 1, 0, 0},
                {0, 4 * l1 - 1, 0},
                {0, 0, 4 * l2 - 1},
                {0, 4 * l2, 4 * l1},
                {4 * l2, 0, 4 * l0},
                {4 * l1, 4 * l0, 0}}};
  return b;
}

TriangleGeometry triangle_geometry(const TriangleMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Vec2& a = mesh.vertices[tri[0]];
  const Vec2& b = mesh.vertices[tri[1]];
  const Vec2& c = mesh.vertices[tri[2]];
  const double det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);

  TriangleGeometry geom;
  geom.area = 0.5 * det;
  // lambda_1, lambda_2 are the reference coordinates of x = a + J (l1, l2);
  // their gradients are the rows of J^{-1}.
  geom.grad_lambda[1] = {(c[1] - a[1]) / det, -(c[0] - a[0]) / det};
  geom.grad_lambda[2] = {-(b[1] - a[1]) / det, (b[0] - a[0]) / det};
  geom.grad_lambda[0] = {-geom.grad_lambda[1][0] - geom.grad_lambda[2][0],
                         -geom.grad_lambda[1][1] - geom.grad_lambda[2][1]};
  return geom;
}

std::array<Vec2, 6> p2_gradients(const P2Basis& basis, const TriangleGeometry& geom) {
  std::array<Vec2, 6> grads{};
  for (int i = 0; i < 6; ++i) {
    for (int k = 0; k < 3; ++k) {
      grads[i][0] += basis.dlambda[i][k] * geom.grad_lambda[k][0];
      grads[i][1] += basis.dlambda[i][k] * geom.grad_lambda[k][1];
    }
  }
  return grads;
}

std::vector<int> DofLayout::boundary_velocity_dofs() const {
  std::vector<int> dofs;
  dofs.reserve(2 * boundary_scalar_dofs.size());
  for (int s : boundary_scalar_dofs) {
    dofs.push_back(2 * s);
    dofs.push_back(2 * s + 1);
  }
  return dofs;
}

DofLayout make_dof_layout(const TriangleMesh& mesh) {
  DofLayout layout;
  layout.n_vertices = mesh.n_vertices();
  layout.n_edges = mesh.n_edges();
  layout.n_triangles = mesh.n_triangles();

  layout.cell_dofs.resize(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      layout.cell_dofs[t][k] = tri[k];
      layout.cell_dofs[t][3 + k] = layout.n_vertices + mesh.triangle_edges[t][k];
    }
  }

  layout.scalar_on_boundary.assign(layout.n_velocity_scalar(), 0);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    layout.scalar_on_boundary[v] = mesh.boundary_vertex[v];
  for (int e = 0; e < mesh.n_edges(); ++e)
    layout.scalar_on_boundary[layout.n_vertices + e] = mesh.boundary_edge[e];
  for (int s = 0; s < layout.n_velocity_scalar(); ++s)
    if (layout.scalar_on_boundary[s]) layout.boundary_scalar_dofs.push_back(s);

  return layout;
}

Vec2 dof_point(const TriangleMesh& mesh, const DofLayout& layout, int scalar_dof) {
  if (scalar_dof < layout.n_vertices) return mesh.vertices[scalar_dof];
  return mesh.edge_midpoint(scalar_dof - layout.n_vertices);
}

double evaluate_scalar_at(const TriangleMesh& mesh, const DofLayout& layout,
                          std::span<const double> coeffs, const PointLocation& loc) {
  const P2Basis basis = p2_basis(loc.barycentric);
  double value = 0.0;
  for (int i = 0; i < 6; ++i) value += coeffs[layout.scalar_dof(loc.triangle, i)] * basis.value[i];
  return value;
}

Vec2 evaluate_velocity_at(const TriangleMesh& mesh, const DofLayout& layout,
                          std::span<const double> coeffs, const PointLocation& loc) {
  const P2Basis basis = p2_basis(loc.barycentric);
  Vec2 value{};
  for (int i = 0; i < 6; ++i) {
    const int s = layout.scalar_dof(loc.triangle, i);
    value[0] += coeffs[2 * s] * basis.value[i];
    value[1] += coeffs[2 * s + 1] * basis.value[i];
  }
  return value;
}

Mat2 evaluate_velocity_gradient_at(const TriangleMesh& mesh, const DofLayout& layout,
                                   std::span<const double> coeffs,
                                   const PointLocation& loc) {
  const P2Basis basis = p2_basis(loc.barycentric);
  const auto grads = p2_gradients(basis, triangle_geometry(mesh, loc.triangle));
  Mat2 g{};
  for (int i = 0; i < 6; ++i) {
    const int s = layout.scalar_dof(loc.triangle, i);
    for (int c = 0; c < 2; ++c) {
      g[c][0] += coeffs[2 * s + c] * grads[i][0];
      g[c][1] += coeffs[2 * s + c] * grads[i][1];
    }
  }
  return g;
}

namespace {
PointLocation locate_or_throw(const TriangleMesh& mesh, const Vec2& p) {
  auto loc = locate_point(mesh, p);
  if (!loc) throw ConfigError("evaluate: point outside the mesh");
  return *loc;
}
}  // namespace

double evaluate_scalar(const TriangleMesh& mesh, const DofLayout& layout,
                       std::span<const double> coeffs, const Vec2& p) {
  return evaluate_scalar_at(mesh, layout, coeffs, locate_or_throw(mesh, p));
}

Vec2 evaluate_velocity(const TriangleMesh& mesh, const DofLayout& layout,
                       std::span<const double> coeffs, const Vec2& p) {
  return evaluate_velocity_at(mesh, layout, coeffs, locate_or_throw(mesh, p));
}

}  // namespace kv
