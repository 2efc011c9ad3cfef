#include "chs/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "chs/amg.hpp"
#include "chs/error.hpp"
#include "chs/krylov.hpp"
#include "chs/truncation.hpp"

namespace chs {

ObstacleBounds ObstacleBounds::box(std::size_t n, double lo, double hi) {
  ObstacleBounds b{Vector(n, lo), Vector(n, hi)};
  b.validate();
  return b;
}

ObstacleBounds ObstacleBounds::unconstrained(std::size_t n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return box(n, -inf, inf);
}

bool ObstacleBounds::contains(std::span<const double> x) const {
  require_dim(x.size() == size(), "obstacle bounds");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  return true;
}

void ObstacleBounds::project(std::span<double> x) const {
  require_dim(x.size() == size(), "obstacle bounds");
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

void ObstacleBounds::validate() const {
  require_dim(lower.size() == upper.size(), "obstacle bounds");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i])) throw InvalidArgument("obstacle bounds crossed at " + std::to_string(i));
}

void pgs_sweep(const RankOneUpdated& A, std::span<const double> b, const ObstacleBounds& bounds,
               std::span<double> x) {
  const std::size_t n = A.size();
  require_dim(b.size() == n && x.size() == n && bounds.size() == n, "projected Gauss-Seidel");
  const SparseMatrix& S = A.base;
  const bool r1 = A.has_update();
  double t = r1 ? dot(A.v, x) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = S.row_cols(i);
    const auto vals = S.row_values(i);
    double ax = 0.0, aii = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      ax += vals[k] * x[cols[k]];
      if (cols[k] == i) aii = vals[k];
    }
    if (r1) {
      ax += A.u[i] * t;
      aii += A.u[i] * A.v[i];
    }
    if (aii == 0.0) continue;
    const double xi = std::clamp(x[i] + (b[i] - ax) / aii, bounds.lower[i], bounds.upper[i]);
    if (r1) t += A.v[i] * (xi - x[i]);
    x[i] = xi;
  }
}

double obstacle_energy(const RankOneUpdated& A, std::span<const double> b, std::span<const double> x) {
  const Vector ax = A * x;
  return 0.5 * dot(ax, x) - dot(b, x);
}

double projected_residual(const RankOneUpdated& A, std::span<const double> b,
                          const ObstacleBounds& bounds, std::span<const double> x) {
  Vector g = A * x;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = std::clamp(x[i] - (g[i] - b[i]), bounds.lower[i], bounds.upper[i]);
    s += (x[i] - step) * (x[i] - step);
  }
  return std::sqrt(s);
}

MmgSolver::MmgSolver(const RankOneUpdated& A, const AggregationOptions& opts, int coarse_sweeps)
    : h_(build_aggregation_hierarchy(A, opts)), coarse_sweeps_(coarse_sweeps) {
  if (coarse_sweeps < 1) throw InvalidArgument("MMG needs at least one coarse sweep");
}

void MmgSolver::vcycle(std::span<const double> b, const ObstacleBounds& bounds,
                       std::span<double> x) const {
  const std::size_t L = h_.n_levels();
  require_dim(b.size() == size() && x.size() == size() && bounds.size() == size(), "MMG cycle");
  if (!bounds.contains(x)) throw InvalidArgument("MMG: iterate violates the obstacle");

  std::vector<Vector> v(L), r(L), lo(L), hi(L);
  r[0] = h_.ops[0] * x;
  axpby(1.0, b, -1.0, r[0]);
  lo[0] = bounds.lower;
  hi[0] = bounds.upper;
  axpy(-1.0, x, lo[0]);
  axpy(-1.0, x, hi[0]);

  for (std::size_t l = 0; l + 1 < L; ++l) {
    const RankOneUpdated& A = h_.ops[l];
    v[l].assign(A.size(), 0.0);
    {
      ObstacleBounds defect{std::move(lo[l]), std::move(hi[l])};
      pgs_sweep(A, r[l], defect, v[l]);
      lo[l] = std::move(defect.lower);
      hi[l] = std::move(defect.upper);
    }
    const Vector av = A * v[l];
    axpy(-1.0, av, r[l]);
    axpy(-1.0, v[l], lo[l]);
    axpy(-1.0, v[l], hi[l]);

    const SparseMatrix& P = h_.prolongation[l];
    const std::size_t nc = P.cols();
    r[l + 1].assign(nc, 0.0);
    P.multiply_transpose(r[l], r[l + 1]);
    lo[l + 1].assign(nc, -std::numeric_limits<double>::infinity());
    hi[l + 1].assign(nc, std::numeric_limits<double>::infinity());
    const auto& agg = h_.aggregates[l];
    for (std::size_t i = 0; i < agg.size(); ++i) {
      lo[l + 1][agg[i]] = std::max(lo[l + 1][agg[i]], lo[l][i]);
      hi[l + 1][agg[i]] = std::min(hi[l + 1][agg[i]], hi[l][i]);
    }
  }

  const std::size_t c = L - 1;
  v[c].assign(h_.ops[c].size(), 0.0);
  const ObstacleBounds coarse{lo[c], hi[c]};
  for (int s = 0; s < coarse_sweeps_; ++s) pgs_sweep(h_.ops[c], r[c], coarse, v[c]);

  for (std::size_t l = c; l-- > 0;) {
    Vector pv(h_.ops[l].size());
    h_.prolongation[l].multiply(v[l + 1], pv);
    axpy(1.0, pv, v[l]);
  }
  axpy(1.0, v[0], x);
  // The corrections respect the defect obstacles exactly in exact arithmetic;
  // clamping removes the last-bit rounding of x + v.
  bounds.project(x);
}

namespace {

constexpr double kEnergyRounding = 1e-14;

std::vector<bool> at_bounds(const ObstacleBounds& bounds, std::span<const double> x) {
  std::vector<bool> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] == bounds.lower[i] || x[i] == bounds.upper[i];
  return out;
}

// Newton step on the nodes F off the obstacle: x_F += A_FF^{-1} (b - A x)_F,
// nodes on the obstacle kept, then projected. Empty if the solve fails.
std::optional<Vector> polish_candidate(const RankOneUpdated& A, std::span<const double> b,
                                       const ObstacleBounds& bounds, std::span<const double> x,
                                       const std::vector<bool>& active, double tol) {
  const TruncationMask mask = TruncationMask::from_active(active);
  if (mask.active_count == x.size()) return std::nullopt;
  Vector r(b.begin(), b.end());
  axpy(-1.0, A * x, r);
  r = mask_vector(r, mask);
  const RankOneUpdated reduced = truncate_spd(A, mask);
  const AmgSolver amg(reduced);
  const KrylovResult res = pcg(reduced.as_op(), amg.as_preconditioner(), r, CgConfig{1000, tol});
  if (!res.converged) return std::nullopt;
  Vector y(x.begin(), x.end());
  axpy(1.0, res.x, y);
  bounds.project(y);
  return y;
}

}  // namespace

ObstacleResult solve_obstacle(const MmgSolver& mmg, std::span<const double> b,
                              const ObstacleBounds& bounds, const ObstacleConfig& cfg,
                              std::span<const double> x0) {
  const std::size_t n = mmg.size();
  require_dim(b.size() == n && bounds.size() == n, "solve_obstacle");
  if (!all_finite(b)) throw NumericalError("solve_obstacle: non-finite right-hand side");
  bounds.validate();
  ObstacleResult res;
  res.x = x0.empty() ? Vector(n, 0.0) : Vector(x0.begin(), x0.end());
  require_dim(res.x.size() == n, "solve_obstacle initial guess");
  bounds.project(res.x);

  const RankOneUpdated& A = mmg.op();
  res.residual = projected_residual(A, b, bounds, res.x);
  res.energy_history.push_back(obstacle_energy(A, b, res.x));
  const double tol = cfg.relative ? cfg.tol * norm2(b) : cfg.tol;
  std::vector<bool> active = at_bounds(bounds, res.x);
  bool polished_this_set = false;
  while (res.residual > tol && res.cycles < cfg.max_cycles) {
    mmg.vcycle(b, bounds, res.x);
    ++res.cycles;
    double energy = obstacle_energy(A, b, res.x);

    std::vector<bool> now = at_bounds(bounds, res.x);
    if (now != active) {
      active = std::move(now);
      polished_this_set = false;
    } else if (cfg.active_set_polish && !polished_this_set) {
      polished_this_set = true;
      ++res.polish_attempts;
      if (auto y = polish_candidate(A, b, bounds, res.x, active, cfg.polish_tol)) {
        // Near the solution energy changes fall below rounding, so a step that
        // lowers the residual is also accepted if the energy stays within it.
        const double ey = obstacle_energy(A, b, *y);
        const bool lower = ey <= energy;
        const bool flat = ey <= energy + kEnergyRounding * std::abs(energy) &&
                          projected_residual(A, b, bounds, *y) < projected_residual(A, b, bounds, res.x);
        if (lower || flat) {
          res.x = std::move(*y);
          energy = ey;
          ++res.polish_accepted;
          active = at_bounds(bounds, res.x);
          polished_this_set = false;
        }
      }
    }
    res.residual = projected_residual(A, b, bounds, res.x);
    res.residual_history.push_back(res.residual);
    res.energy_history.push_back(energy);
  }
  res.converged = res.residual <= tol;
  if (!res.converged && cfg.throw_on_failure) {
    std::ostringstream msg;
    msg << "obstacle solver did not converge in " << res.cycles << " cycles; residual history:";
    for (double r : res.residual_history) msg << ' ' << r;
    throw ConvergenceError(msg.str());
  }
  return res;
}

}  // namespace chs
