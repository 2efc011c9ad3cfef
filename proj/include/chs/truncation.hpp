#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chs/dense.hpp"
#include "chs/rank_one.hpp"
#include "chs/sparse.hpp"

namespace chs {

// Diagonals of T (1 on free nodes) and T_hat = I - T (1 on active nodes).
struct TruncationMask {
  Vector t;
  Vector that;
  std::size_t active_count = 0;

  static TruncationMask none(std::size_t n);
  static TruncationMask from_active(const std::vector<bool>& active);

  std::size_t size() const { return t.size(); }
  bool is_active(std::size_t i) const { return t[i] == 0.0; }
  std::vector<std::size_t> free_nodes() const;
};

inline constexpr double kActivityTol = 1e-12;

// Node j is active iff |u_j| >= 1 - tol. Throws InvalidArgument if some
// |u_j| > 1 + tol.
TruncationMask mask_from_iterate(std::span<const double> u, double tol = kActivityTol);

// Exactly round(fraction * n) active nodes chosen by a seeded shuffle.
TruncationMask random_mask(std::size_t n, double fraction, std::uint64_t seed);

// T A T + T_hat
SparseMatrix truncate_spd(const SparseMatrix& A, const TruncationMask& mask);
DenseMatrix truncate_spd(const DenseMatrix& A, const TruncationMask& mask);
// T (B + u v^T) T + T_hat, keeping the update in factored form (T u)(T v)^T.
RankOneUpdated truncate_spd(const RankOneUpdated& A, const TruncationMask& mask);

// T B
SparseMatrix truncate_rows(const SparseMatrix& B, const TruncationMask& mask);
// T A T (no unit diagonal on active nodes)
SparseMatrix mask_rows_cols(const SparseMatrix& A, const TruncationMask& mask);
// T x
Vector mask_vector(std::span<const double> x, const TruncationMask& mask);

struct MMatrixCertificate {
  bool passed = false;
  bool positive_diagonal = false;
  bool nonpositive_offdiagonal = false;
  bool weakly_dominant = false;
  // Each connected component of the off-diagonal graph has a strictly
  // dominant row (every row when strict).
  bool strictly_dominant_somewhere = false;
  bool inverse_checked = false;
  bool inverse_nonnegative = false;
  double min_inverse_entry = 0.0;
  std::string violation;
};

inline constexpr std::size_t kMMatrixInverseLimit = 400;

// Sufficient M-matrix test: sign pattern plus (irreducible) diagonal
// dominance; for n <= 400 the dense inverse is also checked for entries
// >= -1e-12.
MMatrixCertificate certify_m_matrix(const SparseMatrix& A, bool strict = false);
MMatrixCertificate certify_m_matrix(const DenseMatrix& A, bool strict = false);

}  // namespace chs
