#pragma once

#include <memory>
#include <span>
#include <vector>

#include "kv/sparse.hpp"

namespace kv {

// Direct sparse LU factorization. Deterministic: identical inputs produce
// bit-identical solutions. Throws SolverError on singular matrices, quoting
// the index the factorization stalled at.
class Factorization {
 public:
  explicit Factorization(const SparseMatrix& m);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SaddleSolution {
  std::vector<double> velocity;
  std::vector<double> pressure;  // zero weighted mean
};

// Direct solver for
//     F U - B' P = rhs_u
//     B U       = rhs_p
// where B has the constant pressure vector in the nullspace of B'. One
// pressure dof is pinned to zero during the factorization and the solution is
// shifted to zero weighted mean (weights = triangle areas) afterwards; the
// shift leaves B' P unchanged. With no pressure dofs this degenerates to a
// plain solve with F.
//
// The pattern of the assembled saddle matrix is fixed at construction;
// refactorize() only swaps in new values for F, which is what the Picard loop
// needs every iteration.
class SaddleSolver {
 public:
  SaddleSolver(const SparseMatrix& f_init, const SparseMatrix& b,
               std::vector<double> pressure_weights);
  ~SaddleSolver();
  SaddleSolver(SaddleSolver&&) noexcept;
  SaddleSolver& operator=(SaddleSolver&&) noexcept;

  // f must share the pattern f_init was assembled with.
  void refactorize(const SparseMatrix& f);

  SaddleSolution solve(std::span<const double> rhs_u, std::span<const double> rhs_p) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around SaddleSolver.
SaddleSolution solve_saddle(const SparseMatrix& f, const SparseMatrix& b,
                            std::span<const double> rhs_u, std::span<const double> rhs_p,
                            std::span<const double> pressure_weights);

}  // namespace kv
