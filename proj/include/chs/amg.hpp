#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chs/dense.hpp"
#include "chs/hierarchy.hpp"

namespace chs {

// One Gauss-Seidel sweep on base + u v^T, updating x in place. The rank-one
// product v^T x is carried along so a sweep costs O(nnz + n).
void gauss_seidel(const RankOneUpdated& A, std::span<const double> diag, std::span<const double> b,
                  std::span<double> x, bool forward);

inline constexpr std::size_t kCoarseDirectLimit = 1500;
// Piecewise-constant prolongation underestimates smooth error, so coarse
// corrections are scaled up (same factor as amgcl's plain aggregation).
// The scaled cycle stays symmetric positive definite but can diverge as a
// stationary iteration on deep hierarchies; amg_solve callers pass 1.
inline constexpr double kOverCorrection = 1.5;

// Aggregation AMG for SPD operators: V(1,1) cycles with forward Gauss-Seidel
// before and backward Gauss-Seidel after the coarse correction, so a cycle
// started from zero is a symmetric preconditioner.
class AmgSolver {
 public:
  explicit AmgSolver(const RankOneUpdated& A, const AggregationOptions& opts = {},
                     double over_correction = kOverCorrection);

  // One cycle improving x.
  void vcycle(std::span<const double> b, std::span<double> x) const;
  // One cycle from x = 0.
  LinearOp as_preconditioner() const;

  const Hierarchy& hierarchy() const { return h_; }
  std::size_t size() const { return h_.size(); }

 private:
  void cycle(std::size_t level, std::span<const double> b, std::span<double> x) const;

  Hierarchy h_;
  std::optional<LuFactor> coarse_lu_;
  double over_correction_;
};

struct AmgSolveResult {
  Vector x;
  int cycles = 0;
  bool converged = false;
  double rel_residual = 0.0;
  std::vector<double> history;  // relative residual after each cycle
};

// Repeated V-cycles until ||b - A x|| <= rel_tol ||b||. Throws
// ConvergenceError if the residual grows over 5 consecutive cycles.
AmgSolveResult amg_solve(const AmgSolver& amg, std::span<const double> b, double rel_tol = 1e-7,
                         int max_cycles = 200, std::span<const double> x0 = {});

}  // namespace chs
