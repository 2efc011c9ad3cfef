#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "chs/fem.hpp"
#include "chs/obstacle.hpp"
#include "chs/preconditioner.hpp"
#include "chs/scenario.hpp"

namespace chs {

enum class RhoMode { bisection, fixed };

struct UzawaConfig {
  int iterations = 12;  // Uzawa iterations per time step
  PrecondKind precond = PrecondKind::btdsc;
  GmresConfig gmres;
  InnerConfig inner;
  RhoMode rho_mode = RhoMode::bisection;
  double rho_fixed = 1.0;
  double rho_max = 2.0;
  // Mass conservation is only as good as the u-solves, so they run close to
  // round-off.
  ObstacleConfig obstacle{1e-13, true, 200, false};
};

struct BisectionResult {
  double rho = 1.0;
  int steps = 0;
  bool fallback = false;  // no sign change in the bracket
};

// Zero of a decreasing function phi on [lo, hi] by bisection, stopping after
// max_steps halvings or once the bracket is narrower than width_tol; returns
// the bracket midpoint. Returns rho = 1 if phi(lo) <= 0 or phi(hi) >= 0.
BisectionResult step_length_bisection(const std::function<double(double)>& phi, double lo = 0.0,
                                      double hi = 2.0, int max_steps = 30, double width_tol = 1e-4);

struct UzawaIterationStats {
  std::size_t ntrunc = 0;
  int it1 = 0;
  int it2 = 0;
  double time_s = 0.0;  // solve_saddle wall time
  double rho = 1.0;
  double defect_norm = 0.0;  // ||g + tau K w - M u|| before the update
  bool converged = true;
  int obstacle_cycles = 0;
  bool obstacle_converged = true;
};

// Iterates of one time step. The chemical potential w uses the sign for
// which the u-problem is min 1/2 <A u,u> - <f - M w, u> and the constraint
// reads M u - tau K w = g.
struct UzawaState {
  Vector u;
  Vector w;
  Vector f;  // M u_prev
  Vector g;  // M u_prev
  double rho = 1.0;
  int iteration = 0;
  std::vector<UzawaIterationStats> stats;
};

// Holds the obstacle multigrid for A = eps (K + m m^T), built once.
class UzawaSolver {
 public:
  UzawaSolver(const FemOperators& ops, const UzawaConfig& cfg);

  // Resets f, g from the previous time level; keeps w as the starting guess.
  void begin_step(UzawaState& state, std::span<const double> u_prev) const;
  // u = argmin over [-1,1]^n of 1/2 <A v,v> - <f - M w, v>, warm-started at x0.
  ObstacleResult solve_u(const UzawaState& state, std::span<const double> w,
                         std::span<const double> x0) const;
  // One Uzawa iteration: obstacle solve, truncation, saddle solve for the
  // direction d, step length, w += rho d.
  void iterate(UzawaState& state) const;
  // cfg.iterations Uzawa iterations followed by a final obstacle solve at the
  // last w, so u and w belong together.
  void run_step(UzawaState& state) const;

  const FemOperators& ops() const { return *ops_; }
  const UzawaConfig& config() const { return cfg_; }

 private:
  const FemOperators* ops_;
  UzawaConfig cfg_;
  RankOneUpdated A_;
  std::unique_ptr<MmgSolver> mmg_;
  ObstacleBounds bounds_;
};

struct StepReport {
  int tstep = 0;
  std::size_t ntrunc = 0;
  double pct_trunc = 0.0;
  int it1 = 0;  // rounded mean over the Uzawa iterations of the step
  int it2 = 0;
  double time_s = 0.0;  // total solve_saddle time of the step
  double mass = 0.0;    // 1^T M u
  double max_abs_u = 0.0;
  double final_defect = 0.0;
  bool converged = true;
  std::vector<UzawaIterationStats> iterations;
};

struct EvolutionReport {
  double mass0 = 0.0;
  std::vector<StepReport> rows;
  Vector u_final;
  Vector w_final;
};

using StepCallback = std::function<void(const StepReport&, const Vector& u)>;

EvolutionReport run_evolution(const Mesh& mesh, const Scenario& scenario, const FemOperators& ops,
                              const UzawaConfig& cfg, int n_steps, const StepCallback& on_step = {});

}  // namespace chs
