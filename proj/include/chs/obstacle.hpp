#pragma once

#include <limits>
#include <span>
#include <vector>

#include "chs/hierarchy.hpp"

namespace chs {

// Box constraints lower <= x <= upper; infinite entries mean unconstrained.
struct ObstacleBounds {
  Vector lower;
  Vector upper;

  static ObstacleBounds box(std::size_t n, double lo, double hi);
  static ObstacleBounds unconstrained(std::size_t n);

  std::size_t size() const { return lower.size(); }
  bool contains(std::span<const double> x) const;
  void project(std::span<double> x) const;
  // Throws InvalidArgument unless lower <= upper componentwise.
  void validate() const;
};

// One forward projected Gauss-Seidel sweep for
//   min 1/2 <Ax,x> - <b,x>  subject to the bounds,
// updating x in place. Rows with a zero diagonal are left unchanged.
void pgs_sweep(const RankOneUpdated& A, std::span<const double> b, const ObstacleBounds& bounds,
               std::span<double> x);

double obstacle_energy(const RankOneUpdated& A, std::span<const double> b, std::span<const double> x);
// ||x - clamp(x - (A x - b))||_2
double projected_residual(const RankOneUpdated& A, std::span<const double> b,
                          const ObstacleBounds& bounds, std::span<const double> x);

// Monotone multigrid for the box-constrained quadratic problem on an
// aggregation hierarchy. Each cycle: one projected Gauss-Seidel defect solve
// per level on the way down, with defect obstacles restricted as the max
// (lower) / min (upper) over each aggregate, a fixed number of sweeps on the
// coarsest level, then prolongated corrections summed on the way up.
class MmgSolver {
 public:
  explicit MmgSolver(const RankOneUpdated& A, const AggregationOptions& opts = {},
                     int coarse_sweeps = 30);

  // One cycle. Throws InvalidArgument if x is infeasible; x stays feasible.
  void vcycle(std::span<const double> b, const ObstacleBounds& bounds, std::span<double> x) const;

  const Hierarchy& hierarchy() const { return h_; }
  const RankOneUpdated& op() const { return h_.ops.front(); }
  std::size_t size() const { return h_.size(); }

 private:
  Hierarchy h_;
  int coarse_sweeps_;
};

struct ObstacleConfig {
  double tol = 1e-10;     // on projected_residual
  bool relative = false;  // compare against tol * ||b|| instead of tol
  int max_cycles = 100;
  bool throw_on_failure = true;
  // Once the set of nodes on the obstacle is unchanged over a cycle, take a
  // Newton step on the remaining nodes, project, and keep the result if it
  // lowers the energy.
  bool active_set_polish = true;
  double polish_tol = 1e-10;  // relative CG tolerance of the Newton correction
};

struct ObstacleResult {
  Vector x;
  int cycles = 0;
  bool converged = false;
  double residual = 0.0;
  std::vector<double> residual_history;  // after each cycle
  std::vector<double> energy_history;    // initial energy, then after each cycle
  int polish_attempts = 0;
  int polish_accepted = 0;
};

// Iterates MMG cycles from x0 (projected onto the bounds; zero if empty),
// with the optional active-set polish after a cycle. The energy never
// increases.
// Throws ConvergenceError on non-convergence unless cfg.throw_on_failure is off.
ObstacleResult solve_obstacle(const MmgSolver& mmg, std::span<const double> b,
                              const ObstacleBounds& bounds, const ObstacleConfig& cfg = {},
                              std::span<const double> x0 = {});

}  // namespace chs
