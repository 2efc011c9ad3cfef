#include "chs/krylov.hpp"

#include <cmath>

#include "chs/error.hpp"

namespace chs {

void validate(const GmresConfig& cfg) {
  if (cfg.restart < 1) throw InvalidArgument("GMRES restart must be >= 1");
  if (cfg.max_iters < 1) throw InvalidArgument("GMRES max_iters must be >= 1");
  if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0)) throw InvalidArgument("GMRES rel_tol must lie in (0,1)");
}

namespace {

constexpr double kHappyBreakdown = 1e-14;

void residual(const LinearOp& op, std::span<const double> b, std::span<const double> x,
              std::span<double> r) {
  op(x, r);
  axpby(1.0, b, -1.0, r);
}

}  // namespace

KrylovResult gmres(const LinearOp& op, const LinearOp& precond, std::span<const double> b,
                   const GmresConfig& cfg, std::span<const double> x0) {
  validate(cfg);
  const std::size_t n = b.size();
  if (!all_finite(b)) throw NumericalError("GMRES: non-finite right-hand side");
  KrylovResult res;
  res.x = x0.empty() ? Vector(n, 0.0) : Vector(x0.begin(), x0.end());
  require_dim(res.x.size() == n, "GMRES initial guess");

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    res.converged = true;
    return res;
  }

  const std::size_t m = static_cast<std::size_t>(cfg.restart);
  std::vector<Vector> V(m + 1, Vector(n)), Z(m, Vector(n));
  std::vector<Vector> H(m + 1, Vector(m, 0.0));
  Vector cs(m), sn(m), g(m + 1), w(n), r(n);

  if (x0.empty()) {
    std::copy(b.begin(), b.end(), r.begin());
  } else {
    residual(op, b, res.x, r);
  }

  while (true) {
    const double beta = norm2(r);
    res.rel_residual = beta / bnorm;
    if (res.rel_residual <= cfg.rel_tol) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= cfg.max_iters) return res;

    res.cycle_starts.push_back(res.residual_history.size());
    for (auto& row : H) std::fill(row.begin(), row.end(), 0.0);
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    V[0] = r;
    scale(1.0 / beta, V[0]);

    std::size_t k = 0;
    bool happy = false;
    for (std::size_t j = 0; j < m && res.iterations < cfg.max_iters; ++j) {
      precond(V[j], Z[j]);
      op(Z[j], w);
      ++res.iterations;
      if (!all_finite(w)) throw NumericalError("GMRES: NaN/Inf in operator application");
      const double wnorm0 = norm2(w);
      for (std::size_t i = 0; i <= j; ++i) {
        H[i][j] = dot(w, V[i]);
        axpy(-H[i][j], V[i], w);
      }
      const double hnext = norm2(w);
      H[j + 1][j] = hnext;
      for (std::size_t i = 0; i < j; ++i) {
        const double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
        H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
        H[i][j] = t;
      }
      const double rho = std::hypot(H[j][j], H[j + 1][j]);
      if (rho == 0.0) {
        throw NumericalError("GMRES: singular Hessenberg column");
      }
      cs[j] = H[j][j] / rho;
      sn[j] = H[j + 1][j] / rho;
      H[j][j] = rho;
      H[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      res.residual_history.push_back(std::abs(g[j + 1]) / bnorm);
      k = j + 1;
      if (hnext <= kHappyBreakdown * std::max(wnorm0, 1e-300)) {
        happy = true;
        break;
      }
      if (std::abs(g[j + 1]) / bnorm <= cfg.rel_tol) break;
      V[j + 1] = w;
      scale(1.0 / hnext, V[j + 1]);
    }

    Vector y(k);
    for (std::size_t ii = k; ii-- > 0;) {
      double s = g[ii];
      for (std::size_t l = ii + 1; l < k; ++l) s -= H[ii][l] * y[l];
      y[ii] = s / H[ii][ii];
    }
    for (std::size_t i = 0; i < k; ++i) axpy(y[i], Z[i], res.x);
    if (!all_finite(res.x)) throw NumericalError("GMRES: NaN/Inf in iterate");

    residual(op, b, res.x, r);
    res.rel_residual = norm2(r) / bnorm;
    if (res.rel_residual <= cfg.rel_tol) {
      res.converged = true;
      return res;
    }
    if (happy) {
      res.breakdown = true;
      return res;
    }
  }
}

KrylovResult pcg(const LinearOp& op, const LinearOp& precond, std::span<const double> b,
                 const CgConfig& cfg, std::span<const double> x0) {
  const std::size_t n = b.size();
  KrylovResult res;
  res.x = x0.empty() ? Vector(n, 0.0) : Vector(x0.begin(), x0.end());
  require_dim(res.x.size() == n, "CG initial guess");
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    res.converged = true;
    return res;
  }
  Vector r(n), z(n), p(n), q(n);
  if (x0.empty()) {
    std::copy(b.begin(), b.end(), r.begin());
  } else {
    residual(op, b, res.x, r);
  }
  double rnorm = norm2(r);
  res.rel_residual = rnorm / bnorm;
  if (res.rel_residual <= cfg.rel_tol) {
    res.converged = true;
    return res;
  }
  precond(r, z);
  p = z;
  double rz = dot(r, z);
  while (res.iterations < cfg.max_iters) {
    op(p, q);
    ++res.iterations;
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw NumericalError("CG: operator is not positive definite");
    const double alpha = rz / pq;
    axpy(alpha, p, res.x);
    axpy(-alpha, q, r);
    rnorm = norm2(r);
    if (!std::isfinite(rnorm)) throw NumericalError("CG: NaN/Inf in residual");
    res.rel_residual = rnorm / bnorm;
    res.residual_history.push_back(res.rel_residual);
    if (res.rel_residual <= cfg.rel_tol) {
      res.converged = true;
      return res;
    }
    precond(r, z);
    const double rz_new = dot(r, z);
    axpby(1.0, z, rz_new / rz, p);
    rz = rz_new;
  }
  return res;
}

}  // namespace chs
