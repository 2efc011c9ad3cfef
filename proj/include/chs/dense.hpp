#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chs/sparse.hpp"
#include "chs/vector_ops.hpp"

namespace chs {

// Row-major dense matrix for the desk-scale spectral harness and the coarsest
// multigrid level.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  Vector operator*(std::span<const double> x) const;
  DenseMatrix transpose() const;
  double max_abs() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline constexpr std::size_t kDenseEntryLimit = 4'000'000;

DenseMatrix to_dense(const SparseMatrix& A);
SparseMatrix to_sparse(const DenseMatrix& A);

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B);
// a*A + b*B
DenseMatrix add(double a, const DenseMatrix& A, double b, const DenseMatrix& B);
// A += w * x y^T
void add_outer(DenseMatrix& A, double w, std::span<const double> x, std::span<const double> y);
bool is_symmetric(const DenseMatrix& A, double rel_tol);
void symmetrize(DenseMatrix& A);
// Rows/columns `keep` of A, in order.
DenseMatrix principal_submatrix(const DenseMatrix& A, std::span<const std::size_t> keep);

// A = L L^T. Throws NumericalError when A is not (numerically) SPD.
class Cholesky {
 public:
  explicit Cholesky(const DenseMatrix& A);
  Vector solve(std::span<const double> b) const;
  // X = A^{-1} B column by column.
  DenseMatrix solve(const DenseMatrix& B) const;
  const DenseMatrix& lower() const { return L_; }
  std::size_t size() const { return L_.rows(); }

 private:
  DenseMatrix L_;
};

// PA = LU with partial pivoting. Throws NumericalError on exact singularity.
class LuFactor {
 public:
  explicit LuFactor(const DenseMatrix& A);
  Vector solve(std::span<const double> b) const;
  DenseMatrix solve(const DenseMatrix& B) const;
  double determinant() const;
  std::size_t size() const { return LU_.rows(); }

 private:
  DenseMatrix LU_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
};

DenseMatrix inverse(const DenseMatrix& A);

}  // namespace chs
