#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "chs/eigensolver.hpp"
#include "chs/fem.hpp"
#include "chs/truncation.hpp"

namespace chs {

inline constexpr std::size_t kSpectraNodeLimit = 400;
inline constexpr double kBoundSlack = 1e-8;
// Largest BDSC condition number allowed by the eigenvalue intervals:
// ((1+sqrt5)/2) / (sqrt2-1) = 3.9062...
inline const double kBdscKappaBound = 0.5 * (1.0 + std::sqrt(5.0)) / (std::sqrt(2.0) - 1.0);

struct BoundVerdict {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // distance to the violated side; negative when failing
};

struct SpectralReport {
  std::string precond;
  std::size_t n_nodes = 0;
  std::string mask = "none";
  double eta = 0.0;
  Vector eigenvalues;  // ascending
  double lambda_min = 0.0;  // smallest / largest eigenvalue (signed)
  double lambda_max = 0.0;
  double abs_min = 0.0;     // smallest / largest modulus
  double abs_max = 0.0;
  double kappa = 0.0;       // abs_max / abs_min
  double bound_lo = 0.0;    // interval the verdicts test against
  double bound_hi = 0.0;
  std::vector<BoundVerdict> verdicts;

  bool pass() const;
  void add(std::string name, bool ok, double margin);
};

// Dense blocks of the untruncated problem.
struct DenseBlocks {
  DenseMatrix kbar;  // K + m m^T
  DenseMatrix mass;
  double eta = 0.0;
};

DenseBlocks dense_blocks(const FemOperators& ops);
// [Kbar, M; M, -eta Kbar]
DenseMatrix dense_saddle(const DenseBlocks& b);
// S = eta Kbar + M Kbar^{-1} M and S_pre = S + 2 sqrt(eta) M
DenseMatrix dense_schur(const DenseBlocks& b);
DenseMatrix dense_schur_pre(const DenseBlocks& b);
// diag(Kbar + eta^{-1/2} M, eta Kbar + eta^{1/2} M)
DenseMatrix dense_bd(const DenseBlocks& b);
// diag(Kbar, S_pre)
DenseMatrix dense_bdsc(const DenseBlocks& b);

// u-block rows/columns of the free nodes followed by every w-block index.
std::vector<std::size_t> compressed_indices(const TruncationMask& mask);

// Eigenvalues of K z = mu (K + eta^{-1/2} M) z, ascending.
Vector bd_mu_values(const DenseBlocks& b);
// Eigenvalues predicted from each mu: BD gives +-sqrt(mu^2 + (1-mu)^2),
// BDSC gives the roots of l^2 + (mu^2 - 1) l - (mu^2 + (1-mu)^2) = 0.
Vector bd_predicted(const Vector& mu);
Vector bdsc_predicted(const Vector& mu);

// |lambda| in [1/sqrt2, 1), kappa < sqrt2, per-mu prediction. With a mask,
// the compressed pencil's extremes must lie inside the untruncated ones.
SpectralReport check_bd_bounds(const FemOperators& ops, const TruncationMask* mask = nullptr);
// spec(S_pre^{-1} S) in [1/2, 1), kappa < 2, S and S_pre - S SPD.
SpectralReport check_schur_bounds(const FemOperators& ops);
// spectrum in [-1, 1-sqrt2] u [1, (1+sqrt5)/2], kappa within kBdscKappaBound, per-mu roots.
SpectralReport check_bdsc_bounds(const FemOperators& ops, const TruncationMask* mask = nullptr);
// B^{-1} A = [I, Kbar^{-1} M; 0, S_pre^{-1} S]: eigenvalue 1 n times, the rest in [1/2, 1).
SpectralReport check_btdsc_bounds(const FemOperators& ops);

struct PoincareVerdict {
  bool pass = false;
  double worst = 0.0;  // largest interlacing violation (<= 0 when passing)
  Vector lambda;       // eigenvalues of A
  Vector mu;           // eigenvalues of the compression to the free nodes
};

// lambda_i <= mu_i <= lambda_{n-k+i} for the k free nodes.
PoincareVerdict check_poincare(const DenseMatrix& A, const TruncationMask& mask, double tol = 1e-10);

}  // namespace chs
