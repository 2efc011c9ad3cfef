#include "chs/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chs/error.hpp"

namespace chs {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

Vector DenseMatrix::operator*(std::span<const double> x) const {
  require_dim(x.size() == cols_, "dense matvec");
  Vector y(rows_);
  for (std::size_t i = 0; i < rows_; ++i) y[i] = dot(row(i), x);
  return y;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix T(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix to_dense(const SparseMatrix& A) {
  if (A.rows() * A.cols() > kDenseEntryLimit) {
    throw InvalidArgument("dense expansion of " + std::to_string(A.rows()) + "x" +
                          std::to_string(A.cols()) + " exceeds the size guard");
  }
  DenseMatrix D(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const auto c = A.row_cols(i);
    const auto v = A.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) D(i, c[k]) = v[k];
  }
  return D;
}

SparseMatrix to_sparse(const DenseMatrix& A) {
  std::vector<std::size_t> rp(A.rows() + 1, 0), col;
  Vector val;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
      if (A(i, j) != 0.0) {
        col.push_back(j);
        val.push_back(A(i, j));
      }
    }
    rp[i + 1] = col.size();
  }
  return SparseMatrix::from_csr(A.rows(), A.cols(), std::move(rp), std::move(col), std::move(val));
}

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
  require_dim(A.cols() == B.rows(), "dense product");
  DenseMatrix C(A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    auto ci = C.row(i);
    for (std::size_t k = 0; k < A.cols(); ++k) {
      const double a = A(i, k);
      if (a != 0.0) axpy(a, B.row(k), ci);
    }
  }
  return C;
}

DenseMatrix add(double a, const DenseMatrix& A, double b, const DenseMatrix& B) {
  require_dim(A.rows() == B.rows() && A.cols() == B.cols(), "dense add");
  DenseMatrix C(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) C(i, j) = a * A(i, j) + b * B(i, j);
  return C;
}

void add_outer(DenseMatrix& A, double w, std::span<const double> x, std::span<const double> y) {
  require_dim(x.size() == A.rows() && y.size() == A.cols(), "outer product");
  for (std::size_t i = 0; i < A.rows(); ++i) {
    if (x[i] != 0.0) axpy(w * x[i], y, A.row(i));
  }
}

bool is_symmetric(const DenseMatrix& A, double rel_tol) {
  if (A.rows() != A.cols()) return false;
  const double tol = rel_tol * A.max_abs();
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = i + 1; j < A.cols(); ++j)
      if (std::abs(A(i, j) - A(j, i)) > tol) return false;
  return true;
}

void symmetrize(DenseMatrix& A) {
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = i + 1; j < A.cols(); ++j) {
      const double s = 0.5 * (A(i, j) + A(j, i));
      A(i, j) = s;
      A(j, i) = s;
    }
}

DenseMatrix principal_submatrix(const DenseMatrix& A, std::span<const std::size_t> keep) {
  DenseMatrix S(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b) S(a, b) = A(keep[a], keep[b]);
  return S;
}

Cholesky::Cholesky(const DenseMatrix& A) : L_(A.rows(), A.cols()) {
  if (A.rows() != A.cols()) throw DimensionError("Cholesky needs a square matrix");
  const std::size_t n = A.rows();
  for (std::size_t j = 0; j < n; ++j) {
    const auto lj = L_.row(j).first(j);
    double d = A(j, j) - dot(lj, lj);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw NumericalError("matrix is not positive definite (pivot " + std::to_string(j) + ")");
    }
    d = std::sqrt(d);
    L_(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      L_(i, j) = (A(i, j) - dot(L_.row(i).first(j), lj)) / d;
    }
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  const std::size_t n = size();
  require_dim(b.size() == n, "Cholesky solve");
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = (y[i] - dot(L_.row(i).first(i), std::span<const double>(y).first(i))) / L_(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= L_(k, ii) * y[k];
    y[ii] = s / L_(ii, ii);
  }
  return y;
}

DenseMatrix Cholesky::solve(const DenseMatrix& B) const {
  require_dim(B.rows() == size(), "Cholesky solve");
  // Row-oriented substitution keeps the inner loops contiguous.
  const std::size_t n = size();
  DenseMatrix X = B;
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = X.row(i);
    for (std::size_t k = 0; k < i; ++k) axpy(-L_(i, k), X.row(k), xi);
    scale(1.0 / L_(i, i), xi);
  }
  for (std::size_t i = n; i-- > 0;) {
    auto xi = X.row(i);
    for (std::size_t k = i + 1; k < n; ++k) axpy(-L_(k, i), X.row(k), xi);
    scale(1.0 / L_(i, i), xi);
  }
  return X;
}

LuFactor::LuFactor(const DenseMatrix& A) : LU_(A), perm_(A.rows()) {
  if (A.rows() != A.cols()) throw DimensionError("LU needs a square matrix");
  const std::size_t n = A.rows();
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(LU_(i, k)) > std::abs(LU_(p, k))) p = i;
    if (LU_(p, k) == 0.0) throw NumericalError("matrix is singular");
    if (p != k) {
      std::swap_ranges(LU_.row(k).begin(), LU_.row(k).end(), LU_.row(p).begin());
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    const double piv = LU_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = LU_(i, k) / piv;
      LU_(i, k) = f;
      if (f != 0.0) axpy(-f, LU_.row(k).subspan(k + 1), LU_.row(i).subspan(k + 1));
    }
  }
}

Vector LuFactor::solve(std::span<const double> b) const {
  const std::size_t n = size();
  require_dim(b.size() == n, "LU solve");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = b[perm_[i]] - dot(LU_.row(i).first(i), std::span<const double>(y).first(i));
  }
  for (std::size_t i = n; i-- > 0;) {
    const double s = y[i] - dot(LU_.row(i).subspan(i + 1), std::span<const double>(y).subspan(i + 1));
    y[i] = s / LU_(i, i);
  }
  return y;
}

DenseMatrix LuFactor::solve(const DenseMatrix& B) const {
  require_dim(B.rows() == size(), "LU solve");
  DenseMatrix X(B.rows(), B.cols());
  Vector col(B.rows());
  for (std::size_t j = 0; j < B.cols(); ++j) {
    for (std::size_t i = 0; i < B.rows(); ++i) col[i] = B(i, j);
    const Vector x = solve(col);
    for (std::size_t i = 0; i < B.rows(); ++i) X(i, j) = x[i];
  }
  return X;
}

double LuFactor::determinant() const {
  double d = sign_;
  for (std::size_t i = 0; i < size(); ++i) d *= LU_(i, i);
  return d;
}

DenseMatrix inverse(const DenseMatrix& A) {
  return LuFactor(A).solve(DenseMatrix::identity(A.rows()));
}

}  // namespace chs
