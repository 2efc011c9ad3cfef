#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "chs/amg.hpp"
#include "chs/error.hpp"
#include "chs/fem.hpp"
#include "chs/hierarchy.hpp"
#include "chs/krylov.hpp"
#include "chs/obstacle.hpp"
#include "chs/random.hpp"
#include "qp_oracle.hpp"

using namespace chs;

namespace {

SparseMatrix laplace_1d(std::size_t n) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  return SparseMatrix::from_triplets(n, n, t);
}

Vector random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  Vector v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

DenseMatrix dense_of(const RankOneUpdated& A) {
  auto D = to_dense(A.base);
  if (A.has_update()) add_outer(D, 1.0, A.u, A.v);
  return D;
}

// eps (K + m m^T) on a small mesh, the operator of the u-problem.
RankOneUpdated u_operator(std::size_t side, double eps) {
  const auto ops = make_operators(build_uniform_mesh(side), eps, 1e-5);
  return RankOneUpdated::symmetric(add(eps, ops.K, 0.0, ops.K), ops.m, eps);
}

}  // namespace

TEST(Aggregation, OneDimensionalLaplacianGivesContiguousSmallAggregates) {
  const auto A = laplace_1d(30);
  std::size_t n_agg = 0;
  const auto agg = aggregate_nodes(A, {}, n_agg);
  EXPECT_GE(n_agg, 8u);
  EXPECT_LE(n_agg, 15u);
  std::vector<std::size_t> size(n_agg, 0);
  for (std::size_t i = 0; i < 30; ++i) {
    ++size[agg[i]];
    if (i > 0) {
      EXPECT_LE(agg[i - 1], agg[i]);  // contiguous, numbered left to right
    }
  }
  for (std::size_t s : size) {
    EXPECT_GE(s, 2u);
    EXPECT_LE(s, 4u);
  }
}

TEST(Aggregation, EveryNodeAssignedAndIsolatedNodesLumped) {
  // Diagonal matrix: no strong couplings, so nodes are grouped by 8.
  const auto D = SparseMatrix::identity(20);
  std::size_t n_agg = 0;
  const auto agg = aggregate_nodes(D, {}, n_agg);
  EXPECT_EQ(n_agg, 3u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(agg[i], i / 8);

  const auto ops = make_operators(build_uniform_mesh(12), 1.0, 1.0);
  const auto agg2 = aggregate_nodes(ops.K, {}, n_agg);
  std::set<std::size_t> used(agg2.begin(), agg2.end());
  EXPECT_EQ(used.size(), n_agg);
  EXPECT_LT(n_agg, ops.size() / 2);
}

TEST(Aggregation, GalerkinProductMatchesDense) {
  const auto A = u_operator(7, 0.3);
  std::size_t n_agg = 0;
  const auto agg = aggregate_nodes(A.base, {}, n_agg);
  const auto P = prolongation_from_aggregates(agg, n_agg);
  const auto Ac = galerkin_product(A, P);
  const auto Pd = to_dense(P);
  const auto ref = matmul(Pd.transpose(), matmul(dense_of(A), Pd));
  const auto got = dense_of(Ac);
  for (std::size_t i = 0; i < n_agg; ++i)
    for (std::size_t j = 0; j < n_agg; ++j) EXPECT_NEAR(got(i, j), ref(i, j), 1e-13);
}

TEST(Hierarchy, CoarsensToTargetSize) {
  const auto A = u_operator(33, 1.0);
  const auto h = build_aggregation_hierarchy(A);
  ASSERT_GE(h.n_levels(), 2u);
  EXPECT_LE(h.ops.back().size(), 64u);
  for (std::size_t l = 1; l < h.n_levels(); ++l) EXPECT_LT(h.ops[l].size(), h.ops[l - 1].size());
  EXPECT_THROW(build_aggregation_hierarchy(RankOneUpdated(SparseMatrix(3, 3))), NumericalError);
}

TEST(Amg, StationaryCyclesConverge) {
  for (std::size_t side : {17u, 33u}) {
    const auto A = u_operator(side, 1.0);
    const AmgSolver amg(A, {}, 1.0);
    const auto b = random_vector(A.size(), side);
    const auto res = amg_solve(amg, b, 1e-8, 300);
    ASSERT_TRUE(res.converged) << "side " << side;
    for (std::size_t k = 1; k < res.history.size(); ++k) EXPECT_LT(res.history[k], res.history[k - 1]);
    auto r = A * res.x;
    axpy(-1.0, b, r);
    EXPECT_LT(norm2(r) / norm2(b), 1e-8);
  }
}

TEST(Amg, PcgIterationsGrowSlowly) {
  for (std::size_t side : {17u, 33u, 65u, 129u}) {
    const auto A = u_operator(side, 1.0);
    const AmgSolver amg(A);
    const auto b = random_vector(A.size(), side);
    const auto res = pcg(A.as_op(), amg.as_preconditioner(), b, {200, 1e-8});
    ASSERT_TRUE(res.converged) << "side " << side;
    EXPECT_LE(res.iterations, 30) << "side " << side;
  }
}

TEST(Amg, PreconditionerIsSymmetric) {
  const auto A = u_operator(17, 1.0);
  const AmgSolver amg(A);
  const auto pre = amg.as_preconditioner();
  const auto x = random_vector(A.size(), 1), y = random_vector(A.size(), 2);
  const double xy = dot(x, chs::apply(pre, y)), yx = dot(y, chs::apply(pre, x));
  EXPECT_NEAR(xy, yx, 1e-12 * std::abs(xy));
}

TEST(Amg, GaussSeidelWithRankOneMatchesDenseSweep) {
  const auto A = u_operator(5, 0.7);
  const auto D = dense_of(A);
  const std::size_t n = A.size();
  Vector diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = D(i, i);
  const auto b = random_vector(n, 3);
  Vector x = random_vector(n, 4), ref = x;
  gauss_seidel(A, diag, b, x, true);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s -= D(i, j) * ref[j];
    ref[i] = s / D(i, i);
  }
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], ref[i], 1e-12);
}

TEST(Obstacle, TwoByTwoMatchesEnumeration) {
  DenseMatrix D(2, 2);
  D(0, 0) = 2.0;
  D(0, 1) = D(1, 0) = -1.0;
  D(1, 1) = 2.0;
  const RankOneUpdated A(to_sparse(D));
  const Vector b = {3.0, -0.5};
  const auto bounds = ObstacleBounds::box(2, -1.0, 1.0);
  Vector x = {0.0, 0.0};
  for (int k = 0; k < 200; ++k) pgs_sweep(A, b, bounds, x);
  const auto ref = oracle::brute_force_box_qp(D, b, bounds);
  EXPECT_NEAR(x[0], ref.x[0], 1e-12);
  EXPECT_NEAR(x[1], ref.x[1], 1e-12);
  EXPECT_DOUBLE_EQ(x[0], 1.0);
}

TEST(Obstacle, MmgMatchesBruteForceOnSmallInstances) {
  AggregationOptions deep;
  deep.max_coarse = 2;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto A = u_operator(3, 0.05 + 0.1 * static_cast<double>(seed));
    const std::size_t n = A.size();
    const auto b = random_vector(n, seed, -0.4, 0.4);
    const auto bounds = ObstacleBounds::box(n, -1.0, 1.0);
    const auto ref = oracle::brute_force_box_qp(dense_of(A), b, bounds);
    for (const auto& opts : {AggregationOptions{}, deep}) {
      const MmgSolver mmg(A, opts);
      ObstacleConfig cfg;
      cfg.tol = 1e-13;
      cfg.active_set_polish = false;
      cfg.max_cycles = 2000;
      const auto res = solve_obstacle(mmg, b, bounds, cfg);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(res.x[i], ref.x[i], 1e-8) << "seed " << seed;
    }
  }
}

TEST(Obstacle, EnergyMonotoneAndIteratesFeasible) {
  const auto A = u_operator(33, 0.02);
  const std::size_t n = A.size();
  const auto b = random_vector(n, 11, -0.05, 0.05);
  Vector lo(n), hi(n);
  Rng rng(12);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = -1.0 + 0.5 * rng.uniform();
    hi[i] = lo[i] + 0.2 + rng.uniform();
  }
  const ObstacleBounds bounds{lo, hi};
  const MmgSolver mmg(A);
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo[i];
  double e = obstacle_energy(A, b, x);
  for (int k = 0; k < 25; ++k) {
    mmg.vcycle(b, bounds, x);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_GE(x[i], lo[i]);
      ASSERT_LE(x[i], hi[i]);
    }
    const double e_new = obstacle_energy(A, b, x);
    EXPECT_LE(e_new, e + 1e-14 * std::abs(e));
    e = e_new;
  }
}

TEST(Obstacle, SolveWithPolishReachesTolerance) {
  const auto A = u_operator(65, 0.02);
  const std::size_t n = A.size();
  const auto b = random_vector(n, 21, -2e-4, 2e-4);
  const auto bounds = ObstacleBounds::box(n, -1.0, 1.0);
  const MmgSolver mmg(A);
  ObstacleConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_cycles = 300;
  const auto res = solve_obstacle(mmg, b, bounds, cfg);
  EXPECT_TRUE(res.converged);
  EXPECT_LE(projected_residual(A, b, bounds, res.x), 1e-12);
  EXPECT_TRUE(bounds.contains(res.x));
  for (std::size_t k = 1; k < res.energy_history.size(); ++k)
    EXPECT_LE(res.energy_history[k], res.energy_history[k - 1] + 1e-14 * std::abs(res.energy_history[k - 1]));
}

TEST(Obstacle, WarmStartReachesTightRelativeTolerance) {
  // Warm starts near the solution leave energy changes below rounding; the
  // polish must still be taken so the tight tolerance is reached.
  const auto A = u_operator(129, 0.02);
  const std::size_t n = A.size();
  auto b = random_vector(n, 41, -2e-4, 2e-4);
  const auto bounds = ObstacleBounds::box(n, -1.0, 1.0);
  const MmgSolver mmg(A);
  ObstacleConfig cfg;
  cfg.relative = true;
  cfg.tol = 1e-8;
  const auto first = solve_obstacle(mmg, b, bounds, cfg);
  ASSERT_TRUE(first.converged);
  const auto db = random_vector(n, 43, -1e-14, 1e-14);
  axpy(1.0, db, b);
  cfg.tol = 1e-13;
  cfg.max_cycles = 50;
  const auto res = solve_obstacle(mmg, b, bounds, cfg, first.x);
  EXPECT_TRUE(res.converged) << "residual " << res.residual << " after " << res.cycles << " cycles";
  EXPECT_TRUE(bounds.contains(res.x));
}

TEST(Obstacle, UnconstrainedLimitIsTheLinearSolve) {
  const auto A = u_operator(9, 1.0);
  const std::size_t n = A.size();
  const auto b = random_vector(n, 31);
  const MmgSolver mmg(A);
  ObstacleConfig cfg;
  cfg.tol = 1e-12;
  const auto res = solve_obstacle(mmg, b, ObstacleBounds::unconstrained(n), cfg);
  const auto ref = Cholesky(dense_of(A)).solve(b);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(res.x[i], ref[i], 1e-10);
}

TEST(Obstacle, InvalidInputs) {
  const auto A = u_operator(4, 1.0);
  const MmgSolver mmg(A);
  const auto bounds = ObstacleBounds::box(A.size(), -1.0, 1.0);
  Vector x(A.size(), 2.0);
  EXPECT_THROW(mmg.vcycle(Vector(A.size(), 0.0), bounds, x), InvalidArgument);
  EXPECT_THROW(ObstacleBounds::box(3, 1.0, -1.0).validate(), InvalidArgument);
}
