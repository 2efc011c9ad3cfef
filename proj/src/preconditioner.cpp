#include "chs/preconditioner.hpp"

#include <chrono>
#include <cmath>

#include "chs/error.hpp"

namespace chs {

std::string to_string(PrecondKind kind) {
  switch (kind) {
    case PrecondKind::bd: return "bd";
    case PrecondKind::bdsc: return "bdsc";
    case PrecondKind::btdsc: return "btdsc";
  }
  return "?";
}

PrecondKind parse_precond_kind(const std::string& name) {
  if (name == "bd") return PrecondKind::bd;
  if (name == "bdsc") return PrecondKind::bdsc;
  if (name == "btdsc") return PrecondKind::btdsc;
  throw UsageError("unknown preconditioner '" + name + "' (expected bd, bdsc or btdsc)");
}

SpdSolver::SpdSolver(RankOneUpdated A, const InnerConfig& cfg) : A_(std::move(A)), cfg_(cfg) {
  if (cfg_.mode == InnerMode::dense) {
    DenseMatrix D = to_dense(A_.base);
    if (A_.has_update()) add_outer(D, 1.0, A_.u, A_.v);
    chol_ = std::make_unique<Cholesky>(D);
  } else {
    amg_ = std::make_unique<AmgSolver>(A_);
  }
}

Vector SpdSolver::solve(std::span<const double> rhs) const {
  if (chol_) return chol_->solve(rhs);
  const KrylovResult res =
      pcg(A_.as_op(), amg_->as_preconditioner(), rhs, CgConfig{cfg_.max_iters, cfg_.tol});
  if (!res.converged) {
    throw ConvergenceError("inner CG solve stopped at relative residual " +
                           std::to_string(res.rel_residual));
  }
  return res.x;
}

PreconditionerBlocks build_blocks(const TruncatedSaddleSystem& sys) {
  const FemOperators& ops = *sys.ops;
  PreconditionerBlocks b;
  b.sqrt_eta = std::sqrt(ops.eta);
  b.ahat = sys.ahat;
  b.tmt = mask_rows_cols(ops.M, sys.mask);

  Vector u1 = ops.m;
  scale(b.sqrt_eta, u1);
  b.f1 = RankOneUpdated(add(1.0, b.tmt, b.sqrt_eta, ops.K), std::move(u1), ops.m);

  Vector u2 = sys.ahat.u;
  scale(b.sqrt_eta, u2);
  b.f2 = RankOneUpdated(add(1.0, b.tmt, b.sqrt_eta, sys.ahat.base), std::move(u2), sys.ahat.v);
  return b;
}

BlockPreconditioner::BlockPreconditioner(const TruncatedSaddleSystem& sys, PrecondKind kind,
                                         const InnerConfig& cfg)
    : sys_(&sys), kind_(kind), blocks_(build_blocks(sys)) {
  f1_ = std::make_unique<SpdSolver>(blocks_.f1, cfg);
  f2_ = std::make_unique<SpdSolver>(blocks_.f2, cfg);
  if (kind != PrecondKind::bd) ahat_ = std::make_unique<SpdSolver>(blocks_.ahat, cfg);
}

Vector BlockPreconditioner::apply_schur_inverse(std::span<const double> r) const {
  // S_hat_pre^{-1} = F2^{-1} A_hat F1^{-1}
  const Vector t = f1_->solve(r);
  return f2_->solve(blocks_.ahat * t);
}

void BlockPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  const std::size_t n = sys_->n();
  require_dim(r.size() == 2 * n && z.size() == 2 * n, "block preconditioner");
  const auto r1 = r.first(n), r2 = r.subspan(n);
  Vector z1, z2;
  switch (kind_) {
    case PrecondKind::bd: {
      z1 = f2_->solve(r1);
      scale(blocks_.sqrt_eta, z1);
      z2 = f1_->solve(r2);
      scale(1.0 / blocks_.sqrt_eta, z2);
      break;
    }
    case PrecondKind::bdsc: {
      z1 = ahat_->solve(r1);
      z2 = apply_schur_inverse(r2);
      break;
    }
    case PrecondKind::btdsc: {
      z1 = ahat_->solve(r1);
      Vector t(n);
      sys_->bhat.multiply_transpose(z1, t);
      axpy(-1.0, r2, t);
      z2 = apply_schur_inverse(t);
      break;
    }
  }
  std::copy(z1.begin(), z1.end(), z.begin());
  std::copy(z2.begin(), z2.end(), z.begin() + static_cast<std::ptrdiff_t>(n));
}

LinearOp BlockPreconditioner::as_op() const {
  return [this](std::span<const double> r, std::span<double> z) { apply(r, z); };
}

namespace {

SaddleSolveResult solve_all_truncated(const TruncatedSaddleSystem& sys, std::span<const double> rhs,
                                      const InnerConfig& inner) {
  const FemOperators& ops = *sys.ops;
  const std::size_t n = sys.n();
  SaddleSolveResult out;
  out.degenerate = true;
  // First block row reads x = r1 (A_hat = I, T M = 0).
  out.x.assign(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(n));
  Vector b(rhs.begin() + static_cast<std::ptrdiff_t>(n), rhs.end());
  const double mean = sum(b) / static_cast<double>(n);
  for (double& v : b) v = -(v - mean) / ops.eta;
  SpdSolver kbar(ops.kbar, inner);
  out.w = kbar.solve(b);
  scale(ops.eps, out.w);
  out.converged = true;
  return out;
}

}  // namespace

SaddleSolveResult solve_saddle(const TruncatedSaddleSystem& sys, std::span<const double> rhs,
                               PrecondKind kind, const GmresConfig& cfg, const InnerConfig& inner) {
  require_dim(rhs.size() == sys.size(), "saddle right-hand side");
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = sys.n();
  SaddleSolveResult out;

  if (sys.mask.active_count == n) {
    out = solve_all_truncated(sys, rhs, inner);
  } else {
    const BlockPreconditioner pre(sys, kind, inner);
    const LinearOp op = sys.op();
    const LinearOp pc = pre.as_op();
    bool converged = true;
    const BaseSolver base = [&](std::span<const double> b) {
      const KrylovResult r = gmres(op, pc, b, cfg);
      converged = converged && r.converged;
      return BaseSolve{r.x, r.iterations, r.converged, r.rel_residual};
    };
    const WoodburyResult wr = sherman_woodbury_solve(base, sys.mbar, sys.mbar, rhs);
    out.it1 = wr.first.iterations;
    out.it2 = wr.second.iterations;
    out.converged = converged;
    out.x.assign(wr.x.begin(), wr.x.begin() + static_cast<std::ptrdiff_t>(n));
    out.w.assign(wr.x.begin() + static_cast<std::ptrdiff_t>(n), wr.x.end());
    scale(sys.ops->eps, out.w);
  }

  // True residual of the full system in the rescaled variables.
  Vector v(out.x);
  Vector yprime(out.w);
  scale(1.0 / sys.ops->eps, yprime);
  v.insert(v.end(), yprime.begin(), yprime.end());
  Vector res(sys.size());
  sys.apply_full(v, res);
  axpby(1.0, rhs, -1.0, res);
  const double rn = norm2(rhs);
  out.rel_residual = rn > 0.0 ? norm2(res) / rn : norm2(res);
  out.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace chs
