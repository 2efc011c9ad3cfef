#include "chs/uzawa.hpp"

#include <cmath>

#include "chs/error.hpp"
#include "chs/saddle.hpp"
#include "chs/truncation.hpp"

namespace chs {

BisectionResult step_length_bisection(const std::function<double(double)>& phi, double lo, double hi,
                                      int max_steps, double width_tol) {
  BisectionResult out;
  if (!(phi(lo) > 0.0) || !(phi(hi) < 0.0)) {
    out.fallback = true;
    out.rho = 1.0;
    return out;
  }
  while (out.steps < max_steps && hi - lo >= width_tol) {
    const double mid = 0.5 * (lo + hi);
    const double v = phi(mid);
    ++out.steps;
    if (v == 0.0) {
      lo = hi = mid;
      break;
    }
    (v > 0.0 ? lo : hi) = mid;
  }
  out.rho = 0.5 * (lo + hi);
  return out;
}

UzawaSolver::UzawaSolver(const FemOperators& ops, const UzawaConfig& cfg)
    : ops_(&ops),
      cfg_(cfg),
      A_(RankOneUpdated::symmetric(add(ops.eps, ops.K, 0.0, ops.K), ops.m, ops.eps)),
      bounds_(ObstacleBounds::box(ops.size(), -1.0, 1.0)) {
  if (cfg.iterations < 1) throw InvalidArgument("at least one Uzawa iteration per step");
  validate(cfg.gmres);
  mmg_ = std::make_unique<MmgSolver>(A_);
}

void UzawaSolver::begin_step(UzawaState& state, std::span<const double> u_prev) const {
  require_dim(u_prev.size() == ops_->size(), "previous time level");
  state.f = ops_->M * u_prev;
  state.g = state.f;
  state.u.assign(u_prev.begin(), u_prev.end());
  if (state.w.size() != ops_->size()) state.w.assign(ops_->size(), 0.0);
  state.iteration = 0;
  state.stats.clear();
}

ObstacleResult UzawaSolver::solve_u(const UzawaState& state, std::span<const double> w,
                                    std::span<const double> x0) const {
  Vector rhs = state.f;
  axpy(-1.0, ops_->M * w, rhs);
  return solve_obstacle(*mmg_, rhs, bounds_, cfg_.obstacle, x0);
}

void UzawaSolver::iterate(UzawaState& state) const {
  const FemOperators& ops = *ops_;
  UzawaIterationStats st;

  const ObstacleResult ur = solve_u(state, state.w, state.u);
  state.u = ur.x;
  st.obstacle_cycles = ur.cycles;
  st.obstacle_converged = ur.converged;

  const TruncationMask mask = mask_from_iterate(state.u);
  st.ntrunc = mask.active_count;
  const Vector b = uzawa_defect(ops, state.g, state.w, state.u);
  st.defect_norm = norm2(b);

  const TruncatedSaddleSystem sys = build_system(ops, mask);
  const SaddleSolveResult sr = solve_saddle(sys, saddle_rhs(b), cfg_.precond, cfg_.gmres, cfg_.inner);
  st.it1 = sr.it1;
  st.it2 = sr.it2;
  st.time_s = sr.time_s;
  st.converged = sr.converged;
  const Vector& d = sr.w;

  if (cfg_.rho_mode == RhoMode::fixed) {
    st.rho = cfg_.rho_fixed;
  } else {
    // Directional derivative of the dual functional along d:
    // phi(rho) = d^T (M u(w + rho d) - tau K (w + rho d) - g) = -d^T defect.
    Vector wt(ops.size());
    auto phi = [&](double rho) {
      if (rho == 0.0) return -dot(d, b);
      wt = state.w;
      axpy(rho, d, wt);
      const ObstacleResult r = solve_u(state, wt, state.u);
      return -dot(d, uzawa_defect(ops, state.g, wt, r.x));
    };
    st.rho = step_length_bisection(phi, 0.0, cfg_.rho_max).rho;
  }
  axpy(st.rho, d, state.w);
  state.rho = st.rho;
  ++state.iteration;
  state.stats.push_back(st);
}

void UzawaSolver::run_step(UzawaState& state) const {
  for (int i = 0; i < cfg_.iterations; ++i) iterate(state);
  state.u = solve_u(state, state.w, state.u).x;
}

EvolutionReport run_evolution(const Mesh& mesh, const Scenario& scenario, const FemOperators& ops,
                              const UzawaConfig& cfg, int n_steps, const StepCallback& on_step) {
  if (n_steps < 0) throw InvalidArgument("number of time steps must be non-negative");
  require_dim(mesh.n_nodes() == ops.size(), "mesh and operators");
  const UzawaSolver solver(ops, cfg);
  EvolutionReport report;
  Vector u = init_scenario(mesh, scenario);
  report.mass0 = dot(ops.m, u);

  UzawaState state;
  state.w.assign(ops.size(), 0.0);
  for (int k = 1; k <= n_steps; ++k) {
    solver.begin_step(state, u);
    solver.run_step(state);
    u = state.u;

    StepReport row;
    row.tstep = k;
    row.ntrunc = mask_from_iterate(u).active_count;
    row.pct_trunc = 100.0 * static_cast<double>(row.ntrunc) / static_cast<double>(ops.size());
    double s1 = 0.0, s2 = 0.0;
    for (const auto& st : state.stats) {
      s1 += st.it1;
      s2 += st.it2;
      row.time_s += st.time_s;
      row.converged = row.converged && st.converged && st.obstacle_converged;
    }
    const double cnt = static_cast<double>(state.stats.size());
    row.it1 = static_cast<int>(std::lround(s1 / cnt));
    row.it2 = static_cast<int>(std::lround(s2 / cnt));
    row.mass = dot(ops.m, u);
    for (double v : u) row.max_abs_u = std::max(row.max_abs_u, std::abs(v));
    row.final_defect = norm2(uzawa_defect(ops, state.g, state.w, u));
    row.iterations = state.stats;
    if (on_step) on_step(row, u);
    report.rows.push_back(std::move(row));
  }
  report.u_final = u;
  report.w_final = state.w;
  return report;
}

}  // namespace chs
