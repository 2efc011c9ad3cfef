#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chs/vector_ops.hpp"

namespace chs {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row matrix. Column indices are strictly increasing within
// each row and all stored values are finite.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t n_rows, std::size_t n_cols);

  // Duplicate entries are summed. Contributions to one position are added in
  // ascending value order, so the result does not depend on the order of
  // `entries` and symmetric inputs give bit-symmetric matrices.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix from_csr(std::size_t n_rows, std::size_t n_cols,
                               std::vector<std::size_t> row_ptr, std::vector<std::size_t> col,
                               std::vector<double> values);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(std::span<const double> d);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_index() const { return col_; }
  std::span<const double> values() const { return values_; }

  // Column indices / values of row i.
  std::span<const std::size_t> row_cols(std::size_t i) const;
  std::span<const double> row_values(std::size_t i) const;

  double at(std::size_t i, std::size_t j) const;
  Vector diagonal() const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;
  // y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  SparseMatrix transpose() const;
  bool is_symmetric(double rel_tol = 0.0) const;
  LinearOp as_op() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<double> values_;
};

// a*A + b*B (union of patterns).
SparseMatrix add(double a, const SparseMatrix& A, double b, const SparseMatrix& B);
SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B);
// diag(left) * A * diag(right)
SparseMatrix scale_rows_cols(const SparseMatrix& A, std::span<const double> left,
                             std::span<const double> right);
SparseMatrix add_diagonal(const SparseMatrix& A, std::span<const double> d);

}  // namespace chs
