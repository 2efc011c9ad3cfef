#pragma once

#include <span>
#include <vector>

#include "chs/vector_ops.hpp"

namespace chs {

struct GmresConfig {
  int restart = 60;
  int max_iters = 300;
  double rel_tol = 1e-7;
};

void validate(const GmresConfig& cfg);

struct KrylovResult {
  Vector x;
  // Number of Krylov steps, i.e. applications of the operator inside the
  // Arnoldi/CG recurrences. Residual recomputation at restarts is not counted.
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
  // True relative residual ||b - A x|| / ||b|| of the returned iterate.
  double rel_residual = 0.0;
  // Recurrence residual estimates (relative), one per Krylov step.
  std::vector<double> residual_history;
  // Index into residual_history where each restart cycle begins.
  std::vector<std::size_t> cycle_starts;
};

// Right-preconditioned restarted GMRES. The preconditioned directions are
// stored (flexible variant), so a preconditioner that itself runs an inner
// iteration to a fixed tolerance is handled correctly. Convergence is judged
// on the true residual of the unpreconditioned system.
KrylovResult gmres(const LinearOp& op, const LinearOp& precond, std::span<const double> b,
                   const GmresConfig& cfg, std::span<const double> x0 = {});

struct CgConfig {
  int max_iters = 1000;
  double rel_tol = 1e-7;
};

// Preconditioned conjugate gradients for SPD operators and SPD preconditioners.
KrylovResult pcg(const LinearOp& op, const LinearOp& precond, std::span<const double> b,
                 const CgConfig& cfg, std::span<const double> x0 = {});

}  // namespace chs
