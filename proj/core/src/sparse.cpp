#include "kv/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "kv/errors.hpp"

namespace kv {

SparseMatrix::SparseMatrix(int rows, int cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ConfigError("SparseMatrix: negative dimension");
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw ConfigError("SparseMatrix: triplet out of range");
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  row_offsets_.assign(rows + 1, 0);
  col_indices_.reserve(entries.size());
  values_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < entries.size() && entries[j].row == entries[i].row &&
           entries[j].col == entries[i].col) {
      sum += entries[j].value;
      ++j;
    }
    col_indices_.push_back(entries[i].col);
    values_.push_back(sum);
    ++row_offsets_[entries[i].row + 1];
    i = j;
  }
  for (int r = 0; r < rows; ++r) row_offsets_[r + 1] += row_offsets_[r];
}

double SparseMatrix::coeff(int row, int col) const {
  for (int k = row_offsets_[row]; k < row_offsets_[row + 1]; ++k)
    if (col_indices_[k] == col) return values_[k];
  return 0.0;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_, 0.0);
  for (int r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      sum += values_[k] * x[col_indices_[k]];
    y[r] = sum;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
  std::vector<double> y(cols_, 0.0);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      y[col_indices_[k]] += values_[k] * x[r];
  return y;
}

double SparseMatrix::inner(std::span<const double> x, std::span<const double> y) const {
  double sum = 0.0;
  for (int r = 0; r < rows_; ++r) {
    double row = 0.0;
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      row += values_[k] * y[col_indices_[k]];
    sum += x[r] * row;
  }
  return sum;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         row_offsets_ == other.row_offsets_ && col_indices_ == other.col_indices_;
}

SparseMatrix SparseMatrix::combine(std::span<const double> coeffs,
                                   std::span<const SparseMatrix* const> mats) {
  if (mats.empty() || coeffs.size() != mats.size())
    throw ConfigError("SparseMatrix::combine: mismatched terms");
  SparseMatrix out = *mats[0];
  out.set_combination(coeffs, mats);
  return out;
}

void SparseMatrix::set_combination(std::span<const double> coeffs,
                                   std::span<const SparseMatrix* const> mats) {
  if (mats.empty() || coeffs.size() != mats.size())
    throw ConfigError("SparseMatrix::set_combination: mismatched terms");
  for (const SparseMatrix* m : mats)
    if (!same_pattern(*m)) throw ConfigError("SparseMatrix::set_combination: pattern mismatch");
  std::fill(values_.begin(), values_.end(), 0.0);
  for (std::size_t t = 0; t < mats.size(); ++t) {
    const auto& v = mats[t]->values_;
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += coeffs[t] * v[k];
  }
}

SparseMatrix SparseMatrix::select(std::span<const int> keep_rows,
                                  std::span<const int> keep_cols) const {
  std::vector<int> col_map(cols_, -1);
  for (std::size_t i = 0; i < keep_cols.size(); ++i) col_map[keep_cols[i]] = static_cast<int>(i);

  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < keep_rows.size(); ++i) {
    const int r = keep_rows[i];
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const int c = col_map[col_indices_[k]];
      if (c >= 0) entries.push_back({static_cast<int>(i), c, values_[k]});
    }
  }
  return SparseMatrix(static_cast<int>(keep_rows.size()), static_cast<int>(keep_cols.size()),
                      std::move(entries));
}

}  // namespace kv
