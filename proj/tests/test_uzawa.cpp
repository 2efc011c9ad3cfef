#include <gtest/gtest.h>

#include <cmath>

#include "chs/error.hpp"
#include "chs/fem.hpp"
#include "chs/scenario.hpp"
#include "chs/truncation.hpp"
#include "chs/uzawa.hpp"

using namespace chs;

TEST(Bisection, FindsRootOfDecreasingFunction) {
  const auto r = step_length_bisection([](double x) { return 0.7 - x; });
  EXPECT_FALSE(r.fallback);
  EXPECT_NEAR(r.rho, 0.7, 1e-4);
  const auto r2 = step_length_bisection([](double x) { return std::exp(-x) - 0.5; });
  EXPECT_NEAR(r2.rho, std::log(2.0), 1e-4);
  EXPECT_LE(r2.steps, 30);
}

TEST(Bisection, FallsBackWithoutSignChange) {
  const auto up = step_length_bisection([](double) { return 1.0; });
  EXPECT_TRUE(up.fallback);
  EXPECT_EQ(up.rho, 1.0);
  const auto down = step_length_bisection([](double x) { return -1.0 - x; });
  EXPECT_TRUE(down.fallback);
  EXPECT_EQ(down.rho, 1.0);
}

TEST(Scenario, InitialDataRespectsRanges) {
  const auto mesh = build_uniform_mesh(33);
  Scenario s;
  const auto u = init_scenario(mesh, s);
  EXPECT_EQ(u.front(), 1.0);
  EXPECT_EQ(u.back(), -1.0);
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    EXPECT_GE(u[i], -0.3);
    EXPECT_LE(u[i], 0.5);
  }
  EXPECT_EQ(u, init_scenario(mesh, s));

  s.kind = ScenarioKind::square;
  const auto sq = init_scenario(mesh, s);
  EXPECT_EQ(sq[mesh.node(16, 16)], 1.0);
  EXPECT_EQ(sq[mesh.node(0, 0)], -1.0);

  s.kind = ScenarioKind::artificial;
  s.artificial_fraction = 0.25;
  const auto art = init_scenario(mesh, s);
  EXPECT_EQ(mask_from_iterate(art).active_count,
            static_cast<std::size_t>(std::llround(0.25 * static_cast<double>(mesh.n_nodes()))));
  EXPECT_THROW(parse_scenario_kind("circle"), UsageError);
}

namespace {

// The u-problem optimality conditions at the returned pair (u, w):
// r = A u - f + M w vanishes where |u| < 1, r <= 0 at u = 1 and r >= 0 at
// u = -1.
double kkt_violation(const FemOperators& ops, const Vector& u, const Vector& w, const Vector& f) {
  Vector r = ops.K * u;
  axpy(dot(ops.m, u), ops.m, r);
  scale(ops.eps, r);
  axpy(-1.0, f, r);
  axpy(1.0, ops.M * w, r);
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] >= 1.0) worst = std::max(worst, r[i]);
    else if (u[i] <= -1.0) worst = std::max(worst, -r[i]);
    else worst = std::max(worst, std::abs(r[i]));
  }
  return worst;
}

}  // namespace

TEST(Uzawa, SingleStepSolvesTheCoupledProblem) {
  const auto mesh = build_uniform_mesh(17);
  const auto ops = make_operators(mesh, 0.05, 1e-4);
  Scenario s;
  s.kind = ScenarioKind::square;
  const auto u0 = init_scenario(mesh, s);
  UzawaConfig cfg;
  cfg.iterations = 15;
  const UzawaSolver solver(ops, cfg);
  UzawaState st;
  solver.begin_step(st, u0);
  solver.run_step(st);
  ASSERT_EQ(st.stats.size(), 15u);
  // Constraint M u - tau K w = g and the obstacle conditions.
  const auto defect = uzawa_defect(ops, st.g, st.w, st.u);
  EXPECT_LT(norm2(defect), 1e-10 * norm2(st.g));
  EXPECT_LT(kkt_violation(ops, st.u, st.w, st.f), 1e-10 * norm2(st.f));
  EXPECT_NEAR(dot(ops.m, st.u), dot(ops.m, u0), 1e-12);
  // Defect decreases from the first to the last iteration.
  EXPECT_LT(st.stats.back().defect_norm, st.stats.front().defect_norm);
}

TEST(Uzawa, ShortEvolutionConservesMassAndStaysFeasible) {
  const auto mesh = build_uniform_mesh(17);
  const auto ops = make_operators(mesh, 0.05, 1e-4);
  for (auto kind : {ScenarioKind::random, ScenarioKind::square, ScenarioKind::artificial}) {
    Scenario s;
    s.kind = kind;
    int calls = 0;
    const auto rep = run_evolution(mesh, s, ops, UzawaConfig{}, 3, [&](const StepReport&, const Vector& u) {
      ++calls;
      for (double v : u) ASSERT_LE(std::abs(v), 1.0);
    });
    EXPECT_EQ(calls, 3);
    ASSERT_EQ(rep.rows.size(), 3u);
    for (const auto& row : rep.rows) {
      EXPECT_TRUE(row.converged);
      EXPECT_LE(std::abs(row.mass - rep.mass0), 1e-10 * std::max(std::abs(rep.mass0), 1e-3));
      EXPECT_NEAR(row.pct_trunc, 100.0 * static_cast<double>(row.ntrunc) / static_cast<double>(ops.size()), 1e-12);
      EXPECT_LE(row.max_abs_u, 1.0);
    }
  }
}

TEST(Uzawa, FixedStepLengthIsUsed) {
  const auto mesh = build_uniform_mesh(9);
  const auto ops = make_operators(mesh, 0.05, 1e-4);
  UzawaConfig cfg;
  cfg.rho_mode = RhoMode::fixed;
  cfg.rho_fixed = 0.5;
  cfg.iterations = 3;
  const UzawaSolver solver(ops, cfg);
  UzawaState st;
  solver.begin_step(st, init_scenario(mesh, Scenario{}));
  solver.run_step(st);
  for (const auto& it : st.stats) EXPECT_EQ(it.rho, 0.5);
}

TEST(Uzawa, InvalidConfiguration) {
  const auto ops = make_operators(build_uniform_mesh(5), 0.05, 1e-4);
  UzawaConfig cfg;
  cfg.iterations = 0;
  EXPECT_THROW(UzawaSolver(ops, cfg), InvalidArgument);
}
