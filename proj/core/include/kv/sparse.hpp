#pragma once

#include <span>
#include <vector>

namespace kv {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Compressed sparse row matrix. Building from triplets sums duplicates and
// keeps structural zeros, so matrices assembled over the same stencil share
// an identical pattern and can be combined value-wise.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<Triplet> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  std::span<const int> row_offsets() const { return row_offsets_; }
  std::span<const int> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double coeff(int row, int col) const;  // 0 if not stored

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> multiply_transpose(std::span<const double> x) const;
  double inner(std::span<const double> x, std::span<const double> y) const;  // x' A y

  bool same_pattern(const SparseMatrix& other) const;

  // this <- sum of coeff_i * mats_i. All matrices must share one pattern.
  static SparseMatrix combine(std::span<const double> coeffs,
                              std::span<const SparseMatrix* const> mats);
  void set_combination(std::span<const double> coeffs,
                       std::span<const SparseMatrix* const> mats);

  // Keeps the selected rows/columns in order. Used for Dirichlet elimination.
  SparseMatrix select(std::span<const int> keep_rows, std::span<const int> keep_cols) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

}  // namespace kv
