#include "chs/truncation.hpp"

#include <cmath>
#include <numeric>

#include "chs/error.hpp"
#include "chs/random.hpp"

namespace chs {

TruncationMask TruncationMask::none(std::size_t n) {
  TruncationMask mask;
  mask.t.assign(n, 1.0);
  mask.that.assign(n, 0.0);
  return mask;
}

TruncationMask TruncationMask::from_active(const std::vector<bool>& active) {
  TruncationMask mask = none(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i]) {
      mask.t[i] = 0.0;
      mask.that[i] = 1.0;
      ++mask.active_count;
    }
  }
  return mask;
}

std::vector<std::size_t> TruncationMask::free_nodes() const {
  std::vector<std::size_t> out;
  out.reserve(size() - active_count);
  for (std::size_t i = 0; i < size(); ++i)
    if (!is_active(i)) out.push_back(i);
  return out;
}

TruncationMask mask_from_iterate(std::span<const double> u, double tol) {
  std::vector<bool> active(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double a = std::abs(u[j]);
    if (a > 1.0 + tol) throw InvalidArgument("iterate outside [-1,1] at node " + std::to_string(j));
    active[j] = a >= 1.0 - tol;
  }
  return TruncationMask::from_active(active);
}

TruncationMask random_mask(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidArgument("mask fraction must lie in [0,1]");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<bool> active(n, false);
  for (std::size_t i = 0; i < k; ++i) active[perm[i]] = true;
  return TruncationMask::from_active(active);
}

SparseMatrix mask_rows_cols(const SparseMatrix& A, const TruncationMask& mask) {
  require_dim(A.rows() == mask.size() && A.cols() == mask.size(), "mask_rows_cols");
  return scale_rows_cols(A, mask.t, mask.t);
}

SparseMatrix truncate_spd(const SparseMatrix& A, const TruncationMask& mask) {
  if (mask.active_count == 0) {
    require_dim(A.rows() == mask.size() && A.cols() == mask.size(), "truncate_spd");
    return A;
  }
  std::vector<std::size_t> row_ptr{0}, col;
  std::vector<double> val;
  for (std::size_t i = 0; i < A.rows(); ++i) {
    if (mask.is_active(i)) {
      col.push_back(i);
      val.push_back(1.0);
    } else {
      const auto cols = A.row_cols(i);
      const auto vals = A.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (mask.is_active(cols[k])) continue;
        col.push_back(cols[k]);
        val.push_back(vals[k]);
      }
    }
    row_ptr.push_back(col.size());
  }
  require_dim(A.rows() == mask.size() && A.cols() == mask.size(), "truncate_spd");
  return SparseMatrix::from_csr(A.rows(), A.cols(), std::move(row_ptr), std::move(col), std::move(val));
}

DenseMatrix truncate_spd(const DenseMatrix& A, const TruncationMask& mask) {
  require_dim(A.rows() == mask.size() && A.cols() == mask.size(), "truncate_spd");
  DenseMatrix out = A;
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j)
      out(i, j) = (mask.is_active(i) || mask.is_active(j)) ? (i == j ? 1.0 : 0.0) : A(i, j);
  return out;
}

RankOneUpdated truncate_spd(const RankOneUpdated& A, const TruncationMask& mask) {
  if (!A.has_update()) return RankOneUpdated(truncate_spd(A.base, mask));
  return RankOneUpdated(truncate_spd(A.base, mask), mask_vector(A.u, mask), mask_vector(A.v, mask));
}

SparseMatrix truncate_rows(const SparseMatrix& B, const TruncationMask& mask) {
  require_dim(B.rows() == mask.size(), "truncate_rows");
  std::vector<std::size_t> row_ptr{0}, col;
  std::vector<double> val;
  for (std::size_t i = 0; i < B.rows(); ++i) {
    if (!mask.is_active(i)) {
      const auto cols = B.row_cols(i);
      const auto vals = B.row_values(i);
      col.insert(col.end(), cols.begin(), cols.end());
      val.insert(val.end(), vals.begin(), vals.end());
    }
    row_ptr.push_back(col.size());
  }
  return SparseMatrix::from_csr(B.rows(), B.cols(), std::move(row_ptr), std::move(col), std::move(val));
}

Vector mask_vector(std::span<const double> x, const TruncationMask& mask) {
  require_dim(x.size() == mask.size(), "mask_vector");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = mask.is_active(i) ? 0.0 : x[i];
  return out;
}

MMatrixCertificate certify_m_matrix(const SparseMatrix& A, bool strict) {
  require_dim(A.rows() == A.cols(), "certify_m_matrix");
  constexpr double kSignTol = 1e-13;
  const std::size_t n = A.rows();
  MMatrixCertificate cert;
  const Vector d = A.diagonal();

  cert.positive_diagonal = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d[i] > 0.0)) {
      cert.positive_diagonal = false;
      cert.violation = "non-positive diagonal at row " + std::to_string(i);
      return cert;
    }
  }

  cert.nonpositive_offdiagonal = true;
  cert.weakly_dominant = true;
  std::vector<bool> strict_row(n, false);
  for (std::size_t i = 0; i < n && cert.nonpositive_offdiagonal; ++i) {
    const auto cols = A.row_cols(i);
    const auto vals = A.row_values(i);
    double off = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] == i) continue;
      if (vals[k] > kSignTol * d[i]) {
        cert.nonpositive_offdiagonal = false;
        cert.violation = "positive off-diagonal entry (" + std::to_string(i) + "," +
                         std::to_string(cols[k]) + ")";
        return cert;
      }
      off += std::abs(vals[k]);
    }
    if (d[i] < off * (1.0 - kSignTol)) {
      cert.weakly_dominant = false;
      cert.violation = "row " + std::to_string(i) + " not diagonally dominant";
      return cert;
    }
    strict_row[i] = d[i] > off * (1.0 + kSignTol);
  }

  // Every connected component of the matrix graph needs a strictly dominant row.
  std::vector<int> comp(n, -1);
  bool ok = true;
  for (std::size_t s = 0; s < n && ok; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = static_cast<int>(s);
    bool has_strict = false;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      has_strict = has_strict || strict_row[i];
      const auto cols = A.row_cols(i);
      const auto vals = A.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] == i || std::abs(vals[k]) <= kSignTol * d[i] || comp[cols[k]] >= 0) continue;
        comp[cols[k]] = static_cast<int>(s);
        stack.push_back(cols[k]);
      }
    }
    if (!has_strict) {
      ok = false;
      cert.violation = "no strictly dominant row in the component of node " + std::to_string(s);
    }
  }
  if (strict) {
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!strict_row[i]) {
        ok = false;
        cert.violation = "row " + std::to_string(i) + " not strictly dominant";
      }
    }
  }
  cert.strictly_dominant_somewhere = ok;
  if (!ok) return cert;

  if (n <= kMMatrixInverseLimit) {
    cert.inverse_checked = true;
    const DenseMatrix inv = inverse(to_dense(A));
    double lo = inv(0, 0);
    for (double v : inv.data()) lo = std::min(lo, v);
    cert.min_inverse_entry = lo;
    cert.inverse_nonnegative = lo >= -1e-12;
    if (!cert.inverse_nonnegative) {
      cert.violation = "inverse has a negative entry";
      return cert;
    }
  }
  cert.passed = true;
  return cert;
}

MMatrixCertificate certify_m_matrix(const DenseMatrix& A, bool strict) {
  return certify_m_matrix(to_sparse(A), strict);
}

}  // namespace chs
