#pragma once

#include <array>
#include <span>
#include <vector>

#include "kv/mesh.hpp"

namespace kv {

using Mat2 = std::array<std::array<double, 2>, 2>;  // row-major, [i][j] = d u_i / d x_j

// Quadratic Lagrange basis on a triangle in barycentric form. Local nodes:
// 0..2 the vertices, 3+i the midpoint of the edge opposite vertex i.
struct P2Basis {
  std::array<double, 6> value;
  std::array<std::array<double, 3>, 6> dlambda;  // d phi / d lambda_k
};

P2Basis p2_basis(const std::array<double, 3>& lambda);

// Affine geometry of one triangle: area and the physical gradients of the
// barycentric coordinates.
struct TriangleGeometry {
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda{};
};

TriangleGeometry triangle_geometry(const TriangleMesh& mesh, int t);

// Physical gradients of the six P2 shape functions at one barycentric point.
std::array<Vec2, 6> p2_gradients(const P2Basis& basis, const TriangleGeometry& geom);

// Degree-of-freedom numbering for the P2 velocity / P0 pressure pair.
//  - scalar P2 dofs: vertices first, then edge midpoints (count V + E)
//  - vector velocity dofs interleave components: scalar dof s owns 2s (x)
//    and 2s+1 (y)
//  - pressure dofs are the triangle indices (count T)
struct DofLayout {
  int n_vertices = 0;
  int n_edges = 0;
  int n_triangles = 0;
  std::vector<std::array<int, 6>> cell_dofs;   // scalar dof per (triangle, local node)
  std::vector<int> boundary_scalar_dofs;       // sorted; homogeneous walls
  std::vector<std::uint8_t> scalar_on_boundary;

  int n_velocity_scalar() const { return n_vertices + n_edges; }
  int n_velocity() const { return 2 * n_velocity_scalar(); }
  int n_pressure() const { return n_triangles; }

  int scalar_dof(int tri, int node) const { return cell_dofs[tri][node]; }
  static int velocity_dof(int scalar, int component) { return 2 * scalar + component; }

  std::vector<int> boundary_velocity_dofs() const;  // sorted, interleaved
};

DofLayout make_dof_layout(const TriangleMesh& mesh);

// Nodal coordinates of a scalar P2 dof (vertex or edge midpoint).
Vec2 dof_point(const TriangleMesh& mesh, const DofLayout& layout, int scalar_dof);

// Pointwise evaluation of coefficient fields. The *_at overloads reuse an
// already located point; the others locate internally and throw ConfigError
// for points outside the mesh.
double evaluate_scalar_at(const TriangleMesh& mesh, const DofLayout& layout,
                          std::span<const double> coeffs, const PointLocation& loc);
Vec2 evaluate_velocity_at(const TriangleMesh& mesh, const DofLayout& layout,
                          std::span<const double> coeffs, const PointLocation& loc);
Mat2 evaluate_velocity_gradient_at(const TriangleMesh& mesh, const DofLayout& layout,
                                   std::span<const double> coeffs,
                                   const PointLocation& loc);

double evaluate_scalar(const TriangleMesh& mesh, const DofLayout& layout,
                       std::span<const double> coeffs, const Vec2& p);
Vec2 evaluate_velocity(const TriangleMesh& mesh, const DofLayout& layout,
                       std::span<const double> coeffs, const Vec2& p);

// Nodal interpolant of a vector field into the interleaved velocity vector.
template <typename F>
std::vector<double> interpolate_velocity(const TriangleMesh& mesh, const DofLayout& layout,
                                         F&& f) {
  std::vector<double> coeffs(layout.n_velocity(), 0.0);
  for (int s = 0; s < layout.n_velocity_scalar(); ++s) {
    const Vec2 p = dof_point(mesh, layout, s);
    const Vec2 v = f(p);
    coeffs[2 * s] = v[0];
    coeffs[2 * s + 1] = v[1];
  }
  return coeffs;
}

template <typename F>
std::vector<double> interpolate_scalar(const TriangleMesh& mesh, const DofLayout& layout,
                                       F&& f) {
  std::vector<double> coeffs(layout.n_velocity_scalar(), 0.0);
  for (int s = 0; s < layout.n_velocity_scalar(); ++s)
    coeffs[s] = f(dof_point(mesh, layout, s));
  return coeffs;
}

}  // namespace kv
