#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kv/fem.hpp"
#include "kv/mesh.hpp"
#include "kv/sparse.hpp"

namespace kv {

// Galerkin operators for the quadratic velocity / constant pressure pair.
// Vector operators act on interleaved velocity vectors (size 2(V+E)) and are
// assembled over the full 6x6 per-component stencil, so mass, stiffness and
// convection share one sparsity pattern. Bilinear forms use a degree-4 rule,
// convection degree-5, functionals degree-10; all are exact for the
// polynomial integrands involved.

SparseMatrix assemble_mass(const TriangleMesh& mesh, const DofLayout& layout);
SparseMatrix assemble_stiffness(const TriangleMesh& mesh, const DofLayout& layout);

// Pressure-velocity coupling, one row per triangle: B[K, j] = (div phi_j, 1)_K.
SparseMatrix assemble_divergence(const TriangleMesh& mesh, const DofLayout& layout);

// Skew-symmetrized convection about the coefficient field w:
//   phi' N(w) u = 1/2 (w.grad u, phi) - 1/2 (w.grad phi, u),
// so v' N(w) v vanishes for every v, which is what makes the implicit energy
// estimate unconditional.
SparseMatrix assemble_convection(const TriangleMesh& mesh, const DofLayout& layout,
                                 std::span<const double> w);

// (f, phi) for a vector field f(x).
std::vector<double> assemble_load(const TriangleMesh& mesh, const DofLayout& layout,
                                  const std::function<Vec2(const Vec2&)>& f);

// Scalar single-component variants on the P2 space (used by the eigenvalue
// estimate; the vector operators scatter the same element kernels twice).
SparseMatrix assemble_scalar_mass(const TriangleMesh& mesh, const DofLayout& layout);
SparseMatrix assemble_scalar_stiffness(const TriangleMesh& mesh, const DofLayout& layout);

// Homogeneous Dirichlet elimination: drops the constrained rows and columns
// symmetrically. Throws ConfigError when nothing remains.
struct DirichletReduction {
  std::vector<int> free_dofs;     // free index -> full index, sorted
  std::vector<int> full_to_free;  // -1 for constrained dofs

  int n_free() const { return static_cast<int>(free_dofs.size()); }

  SparseMatrix reduce_square(const SparseMatrix& m) const;
  SparseMatrix reduce_columns(const SparseMatrix& m) const;  // keeps all rows
  std::vector<double> restrict_vector(std::span<const double> full) const;
  std::vector<double> expand_vector(std::span<const double> reduced, int full_size) const;
};

DirichletReduction apply_dirichlet(int n_dofs, std::span<const int> constrained_dofs);

// Reduction for the no-slip velocity space of a mesh.
DirichletReduction velocity_dirichlet(const TriangleMesh& mesh, const DofLayout& layout);

}  // namespace kv
