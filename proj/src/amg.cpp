#include "chs/amg.hpp"

#include <cmath>

#include "chs/error.hpp"

namespace chs {

void gauss_seidel(const RankOneUpdated& A, std::span<const double> diag, std::span<const double> b,
                  std::span<double> x, bool forward) {
  const SparseMatrix& S = A.base;
  const std::size_t n = S.rows();
  const bool r1 = A.has_update();
  double t = r1 ? dot(A.v, x) : 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = forward ? step : n - 1 - step;
    const auto cols = S.row_cols(i);
    const auto vals = S.row_values(i);
    double ax = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) ax += vals[k] * x[cols[k]];
    if (r1) ax += A.u[i] * t;
    const double delta = (b[i] - ax) / diag[i];
    x[i] += delta;
    if (r1) t += A.v[i] * delta;
  }
}

AmgSolver::AmgSolver(const RankOneUpdated& A, const AggregationOptions& opts, double over_correction)
    : h_(build_aggregation_hierarchy(A, opts)), over_correction_(over_correction) {
  const RankOneUpdated& coarse = h_.ops.back();
  if (coarse.size() <= kCoarseDirectLimit) {
    DenseMatrix D = to_dense(coarse.base);
    if (coarse.has_update()) add_outer(D, 1.0, coarse.u, coarse.v);
    coarse_lu_.emplace(D);
  }
}

void AmgSolver::cycle(std::size_t level, std::span<const double> b, std::span<double> x) const {
  const RankOneUpdated& A = h_.ops[level];
  const auto& diag = h_.diagonals[level];
  if (level + 1 == h_.n_levels()) {
    if (coarse_lu_) {
      const Vector sol = coarse_lu_->solve(b);
      std::copy(sol.begin(), sol.end(), x.begin());
    } else {
      for (int s = 0; s < 20; ++s) {
        gauss_seidel(A, diag, b, x, true);
        gauss_seidel(A, diag, b, x, false);
      }
    }
    return;
  }
  gauss_seidel(A, diag, b, x, true);
  Vector r(A.size());
  A.multiply(x, r);
  axpby(1.0, b, -1.0, r);
  const SparseMatrix& P = h_.prolongation[level];
  Vector rc(P.cols()), xc(P.cols(), 0.0);
  P.multiply_transpose(r, rc);
  cycle(level + 1, rc, xc);
  Vector corr(A.size());
  P.multiply(xc, corr);
  axpy(over_correction_, corr, x);
  gauss_seidel(A, diag, b, x, false);
}

void AmgSolver::vcycle(std::span<const double> b, std::span<double> x) const {
  require_dim(b.size() == size() && x.size() == size(), "AMG V-cycle");
  cycle(0, b, x);
}

LinearOp AmgSolver::as_preconditioner() const {
  return [this](std::span<const double> b, std::span<double> x) {
    std::fill(x.begin(), x.end(), 0.0);
    vcycle(b, x);
  };
}

AmgSolveResult amg_solve(const AmgSolver& amg, std::span<const double> b, double rel_tol,
                         int max_cycles, std::span<const double> x0) {
  const std::size_t n = amg.size();
  require_dim(b.size() == n, "amg_solve right-hand side");
  AmgSolveResult res;
  res.x = x0.empty() ? Vector(n, 0.0) : Vector(x0.begin(), x0.end());
  require_dim(res.x.size() == n, "amg_solve initial guess");
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    res.converged = true;
    return res;
  }
  const RankOneUpdated& A = amg.hierarchy().ops.front();
  Vector r(n);
  auto rel_res = [&] {
    A.multiply(res.x, r);
    axpby(1.0, b, -1.0, r);
    return norm2(r) / bnorm;
  };
  res.rel_residual = rel_res();
  int growth = 0;
  while (res.rel_residual > rel_tol && res.cycles < max_cycles) {
    amg.vcycle(b, res.x);
    ++res.cycles;
    const double next = rel_res();
    if (!std::isfinite(next)) throw NumericalError("AMG: NaN/Inf in residual");
    growth = next > res.rel_residual ? growth + 1 : 0;
    res.rel_residual = next;
    res.history.push_back(next);
    if (growth >= 5) throw ConvergenceError("AMG diverged: residual grew over 5 consecutive cycles");
  }
  res.converged = res.rel_residual <= rel_tol;
  return res;
}

}  // namespace chs
