#pragma once

#include <span>

#include "chs/fem.hpp"
#include "chs/truncation.hpp"

namespace chs {

// The eta-rescaled truncated saddle operator
//   [ A_hat   T M    ]
//   [ M T    -eta Kbar ]  + mbar mbar^T,   mbar = [0; sqrt(eta) m],
// with A_hat = T Kbar T + T_hat. Unknowns are (x, y') with y' = y / eps.
struct TruncatedSaddleSystem {
  const FemOperators* ops = nullptr;
  TruncationMask mask;
  RankOneUpdated ahat;   // T Kbar T + T_hat, update (T m)(T m)^T
  SparseMatrix bhat;     // T M, the (1,2) block; the (2,1) block is its transpose M T
  RankOneUpdated neg_c;  // -eta Kbar
  Vector mbar;           // length 2n

  std::size_t n() const { return mask.size(); }
  std::size_t size() const { return 2 * n(); }

  // y = A_hat_full x without the mbar term.
  void apply(std::span<const double> x, std::span<double> y) const;
  // y = (A_hat_full + mbar mbar^T) x
  void apply_full(std::span<const double> x, std::span<double> y) const;
  LinearOp op() const;
  LinearOp full_op() const;
};

TruncatedSaddleSystem build_system(const FemOperators& ops, const TruncationMask& mask);

// [0; b]
Vector saddle_rhs(std::span<const double> b);

// Defect of the constraint equation: g + tau K w - M u.
Vector uzawa_defect(const FemOperators& ops, std::span<const double> g, std::span<const double> w,
                    std::span<const double> u);

}  // namespace chs
