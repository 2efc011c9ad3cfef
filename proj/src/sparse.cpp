#include "chs/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chs/error.hpp"
#include "chs/simd.hpp"

namespace chs {

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols)
    : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(n_rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::vector<Triplet> entries) {
  for (const Triplet& t : entries) {
    if (t.row >= n_rows || t.col >= n_cols) throw DimensionError("triplet index out of range");
    if (!std::isfinite(t.value)) throw NumericalError("non-finite matrix entry");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.value < b.value;
  });

  SparseMatrix out(n_rows, n_cols);
  out.col_.reserve(entries.size());
  out.values_.reserve(entries.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    while (k < entries.size() && entries[k].row == i) {
      const std::size_t j = entries[k].col;
      double s = 0.0;
      while (k < entries.size() && entries[k].row == i && entries[k].col == j) {
        s += entries[k].value;
        ++k;
      }
      out.col_.push_back(j);
      out.values_.push_back(s);
    }
    out.row_ptr_[i + 1] = out.col_.size();
  }
  return out;
}

SparseMatrix SparseMatrix::from_csr(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<std::size_t> row_ptr, std::vector<std::size_t> col,
                                    std::vector<double> values) {
  if (row_ptr.size() != n_rows + 1 || row_ptr.front() != 0 || row_ptr.back() != col.size() ||
      col.size() != values.size()) {
    throw DimensionError("inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (row_ptr[i] > row_ptr[i + 1]) throw InvalidArgument("row offsets not monotone");
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col[k] >= n_cols) throw DimensionError("column index out of range");
      if (k > row_ptr[i] && col[k] <= col[k - 1]) {
        throw InvalidArgument("column indices not strictly increasing in row " + std::to_string(i));
      }
      if (!std::isfinite(values[k])) throw NumericalError("non-finite matrix entry");
    }
  }
  SparseMatrix out;
  out.n_rows_ = n_rows;
  out.n_cols_ = n_cols;
  out.row_ptr_ = std::move(row_ptr);
  out.col_ = std::move(col);
  out.values_ = std::move(values);
  return out;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  Vector ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> rp(n + 1), col(n);
  for (std::size_t i = 0; i < n; ++i) {
    rp[i + 1] = i + 1;
    col[i] = i;
  }
  return from_csr(n, n, std::move(rp), std::move(col), Vector(d.begin(), d.end()));
}

std::span<const std::size_t> SparseMatrix::row_cols(std::size_t i) const {
  return std::span<const std::size_t>(col_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
}

std::span<const double> SparseMatrix::row_values(std::size_t i) const {
  return std::span<const double>(values_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= n_rows_ || j >= n_cols_) throw DimensionError("index out of range");
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(n_rows_, n_cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  require_dim(x.size() == n_cols_ && y.size() == n_rows_, "spmv");
  simd::active().csr_spmv(n_rows_, row_ptr_.data(), col_.data(), values_.data(), x.data(),
                          y.data());
}

Vector SparseMatrix::operator*(std::span<const double> x) const {
  Vector y(n_rows_);
  multiply(x, y);
  return y;
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  require_dim(x.size() == n_rows_ && y.size() == n_cols_, "spmv transpose");
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_[k]] += values_[k] * x[i];
  }
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> rp(n_cols_ + 1, 0);
  for (std::size_t c : col_) ++rp[c + 1];
  for (std::size_t j = 0; j < n_cols_; ++j) rp[j + 1] += rp[j];
  std::vector<std::size_t> col(nnz());
  Vector val(nnz());
  std::vector<std::size_t> next(rp.begin(), rp.end() - 1);
  for (std::size_t i = 0; i < n_rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t dst = next[col_[k]]++;
      col[dst] = i;
      val[dst] = values_[k];
    }
  }
  return from_csr(n_cols_, n_rows_, std::move(rp), std::move(col), std::move(val));
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
  if (n_rows_ != n_cols_) return false;
  double scale = 0.0;
  for (double v : values_) scale = std::max(scale, std::abs(v));
  const double tol = rel_tol * scale;
  for (std::size_t i = 0; i < n_rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (std::abs(values_[k] - at(col_[k], i)) > tol) return false;
    }
  }
  return true;
}

LinearOp SparseMatrix::as_op() const {
  return [this](std::span<const double> x, std::span<double> y) { multiply(x, y); };
}

SparseMatrix add(double a, const SparseMatrix& A, double b, const SparseMatrix& B) {
  require_dim(A.rows() == B.rows() && A.cols() == B.cols(), "sparse add");
  std::vector<std::size_t> rp(A.rows() + 1, 0), col;
  Vector val;
  col.reserve(A.nnz() + B.nnz());
  val.reserve(A.nnz() + B.nnz());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const auto ac = A.row_cols(i), bc = B.row_cols(i);
    const auto av = A.row_values(i), bv = B.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ac.size() || q < bc.size()) {
      if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
        col.push_back(ac[p]);
        val.push_back(a * av[p++]);
      } else if (p == ac.size() || bc[q] < ac[p]) {
        col.push_back(bc[q]);
        val.push_back(b * bv[q++]);
      } else {
        col.push_back(ac[p]);
        val.push_back(a * av[p++] + b * bv[q++]);
      }
    }
    rp[i + 1] = col.size();
  }
  return SparseMatrix::from_csr(A.rows(), A.cols(), std::move(rp), std::move(col), std::move(val));
}

SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B) {
  require_dim(A.cols() == B.rows(), "sparse product");
  std::vector<std::size_t> rp(A.rows() + 1, 0), col;
  Vector val;
  Vector acc(B.cols(), 0.0);
  std::vector<char> used(B.cols(), 0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    touched.clear();
    const auto ac = A.row_cols(i);
    const auto av = A.row_values(i);
    for (std::size_t p = 0; p < ac.size(); ++p) {
      const auto bc = B.row_cols(ac[p]);
      const auto bv = B.row_values(ac[p]);
      for (std::size_t q = 0; q < bc.size(); ++q) {
        if (!used[bc[q]]) {
          used[bc[q]] = 1;
          touched.push_back(bc[q]);
        }
        acc[bc[q]] += av[p] * bv[q];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t j : touched) {
      col.push_back(j);
      val.push_back(acc[j]);
      acc[j] = 0.0;
      used[j] = 0;
    }
    rp[i + 1] = col.size();
  }
  return SparseMatrix::from_csr(A.rows(), B.cols(), std::move(rp), std::move(col), std::move(val));
}

SparseMatrix scale_rows_cols(const SparseMatrix& A, std::span<const double> left,
                             std::span<const double> right) {
  require_dim(left.size() == A.rows() && right.size() == A.cols(), "row/column scaling");
  std::vector<std::size_t> rp(A.row_ptr().begin(), A.row_ptr().end());
  std::vector<std::size_t> col(A.col_index().begin(), A.col_index().end());
  Vector val(A.values().begin(), A.values().end());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) val[k] = left[i] * val[k] * right[col[k]];
  }
  return SparseMatrix::from_csr(A.rows(), A.cols(), std::move(rp), std::move(col), std::move(val));
}

SparseMatrix add_diagonal(const SparseMatrix& A, std::span<const double> d) {
  require_dim(A.rows() == A.cols() && d.size() == A.rows(), "add diagonal");
  return add(1.0, A, 1.0, SparseMatrix::diagonal(d));
}

}  // namespace chs
