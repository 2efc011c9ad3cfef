#pragma once

#include <memory>
#include <optional>
#include <string>

#include "chs/amg.hpp"
#include "chs/krylov.hpp"
#include "chs/saddle.hpp"
#include "chs/sherman_woodbury.hpp"

namespace chs {

enum class PrecondKind { bd, bdsc, btdsc };

std::string to_string(PrecondKind kind);
// Throws UsageError for unknown names.
PrecondKind parse_precond_kind(const std::string& name);

enum class InnerMode { pcg_amg, dense };

struct InnerConfig {
  InnerMode mode = InnerMode::pcg_amg;
  double tol = 1e-7;
  int max_iters = 500;
};

// Inverse of one SPD block: AMG-preconditioned CG to a fixed relative
// tolerance, or a dense Cholesky factorisation.
class SpdSolver {
 public:
  SpdSolver(RankOneUpdated A, const InnerConfig& cfg);

  // Throws ConvergenceError if CG misses the tolerance.
  Vector solve(std::span<const double> rhs) const;
  const RankOneUpdated& op() const { return A_; }

 private:
  RankOneUpdated A_;
  InnerConfig cfg_;
  std::unique_ptr<AmgSolver> amg_;
  std::unique_ptr<Cholesky> chol_;
};

// Blocks shared by the three preconditioners (TMT is the symmetrised
// truncated mass):
//   A_hat = T Kbar T + T_hat
//   F1    = TMT + sqrt(eta) Kbar
//   F2    = TMT + sqrt(eta) A_hat
// and the Schur approximation S_hat_pre = F1 A_hat^{-1} F2.
struct PreconditionerBlocks {
  RankOneUpdated ahat;
  RankOneUpdated f1;
  RankOneUpdated f2;
  SparseMatrix tmt;
  double sqrt_eta = 0.0;
};

PreconditionerBlocks build_blocks(const TruncatedSaddleSystem& sys);

// BD:    diag(A_hat + eta^{-1/2} TMT, eta Kbar + eta^{1/2} TMT)
// BDSC:  diag(A_hat, S_hat_pre)
// BTDSC: [A_hat, 0; M T, -S_hat_pre]
class BlockPreconditioner {
 public:
  BlockPreconditioner(const TruncatedSaddleSystem& sys, PrecondKind kind, const InnerConfig& cfg = {});

  void apply(std::span<const double> r, std::span<double> z) const;
  LinearOp as_op() const;
  PrecondKind kind() const { return kind_; }
  const PreconditionerBlocks& blocks() const { return blocks_; }

 private:
  Vector apply_schur_inverse(std::span<const double> r) const;

  const TruncatedSaddleSystem* sys_;
  PrecondKind kind_;
  PreconditionerBlocks blocks_;
  std::unique_ptr<SpdSolver> ahat_;
  std::unique_ptr<SpdSolver> f1_;
  std::unique_ptr<SpdSolver> f2_;
};

struct SaddleSolveResult {
  Vector x;       // u-part
  Vector w;       // w-part, already scaled back: w = eps * y'
  int it1 = 0;    // GMRES steps for the right-hand side
  int it2 = 0;    // GMRES steps for the rank-one column
  bool converged = false;
  bool degenerate = false;  // every node truncated; solved through the guarded path
  double rel_residual = 0.0;
  double time_s = 0.0;      // preconditioner setup plus both solves
};

// Solves (A_hat_full + mbar mbar^T) v = rhs by Sherman-Woodbury with two
// preconditioned GMRES solves. When every node is truncated the system is
// singular (the update cancels the constant mode of Kbar); then the w-part
// solves -eta Kbar y = b projected to zero mean, the unique solution with
// m^T y = 0.
SaddleSolveResult solve_saddle(const TruncatedSaddleSystem& sys, std::span<const double> rhs,
                               PrecondKind kind, const GmresConfig& cfg,
                               const InnerConfig& inner = {});

}  // namespace chs
