#include <gtest/gtest.h>

#include <cmath>

#include "chs/dense.hpp"
#include "chs/fem.hpp"
#include "chs/preconditioner.hpp"
#include "chs/random.hpp"
#include "chs/saddle.hpp"

using namespace chs;

namespace {

Vector random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

double rel_err(std::span<const double> a, std::span<const double> b) {
  Vector d(a.begin(), a.end());
  axpy(-1.0, b, d);
  return norm2(d) / std::max(norm2(b), 1e-300);
}

// Dense blocks built directly from the definitions.
struct DenseSaddle {
  DenseMatrix ahat, tm, tmt, kbar, full;  // full = [ahat, TM; MT, -eta Kbar] + mbar mbar^T
  DenseMatrix f1, f2, spre;
  double eta;
};

DenseSaddle dense_saddle(const FemOperators& ops, const TruncationMask& mask) {
  const std::size_t n = ops.size();
  DenseSaddle d;
  d.eta = ops.eta;
  d.kbar = to_dense(ops.K);
  add_outer(d.kbar, 1.0, ops.m, ops.m);
  const auto M = to_dense(ops.M);
  d.ahat = DenseMatrix(n, n);
  d.tm = DenseMatrix(n, n);
  d.tmt = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d.ahat(i, j) = mask.t[i] * d.kbar(i, j) * mask.t[j] + (i == j ? mask.that[i] : 0.0);
      d.tm(i, j) = mask.t[i] * M(i, j);
      d.tmt(i, j) = mask.t[i] * M(i, j) * mask.t[j];
    }
  }
  d.full = DenseMatrix(2 * n, 2 * n);
  const double s = std::sqrt(d.eta);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d.full(i, j) = d.ahat(i, j);
      d.full(i, n + j) = d.tm(i, j);
      d.full(n + i, j) = d.tm(j, i);
      d.full(n + i, n + j) = -d.eta * d.kbar(i, j) + d.eta * ops.m[i] * ops.m[j];
    }
  }
  d.f1 = add(1.0, d.tmt, s, d.kbar);
  d.f2 = add(1.0, d.tmt, s, d.ahat);
  d.spre = matmul(d.f1, Cholesky(d.ahat).solve(d.f2));
  return d;
}

DenseMatrix preconditioner_matrix(const DenseSaddle& d, PrecondKind kind) {
  const std::size_t n = d.ahat.rows();
  const double s = std::sqrt(d.eta);
  DenseMatrix B(2 * n, 2 * n);
  DenseMatrix b11, b22;
  if (kind == PrecondKind::bd) {
    b11 = add(1.0, d.ahat, 1.0 / s, d.tmt);
    b22 = add(d.eta, d.kbar, s, d.tmt);
  } else {
    b11 = d.ahat;
    b22 = d.spre;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      B(i, j) = b11(i, j);
      B(n + i, n + j) = kind == PrecondKind::btdsc ? -b22(i, j) : b22(i, j);
      if (kind == PrecondKind::btdsc) B(n + i, j) = d.tm(j, i);
    }
  }
  return B;
}

class SaddleFixture : public ::testing::Test {
 protected:
  SaddleFixture()
      : mesh(build_uniform_mesh(9)), ops(make_operators(mesh, 0.02, 1e-5)),
        mask(random_mask(ops.size(), 0.3, 3)) {}
  Mesh mesh;
  FemOperators ops;
  TruncationMask mask;
};

}  // namespace

TEST_F(SaddleFixture, OperatorMatchesDenseAssembly) {
  const auto sys = build_system(ops, mask);
  const auto d = dense_saddle(ops, mask);
  const auto x = random_vector(sys.size(), 1);
  Vector y(sys.size());
  sys.apply_full(x, y);
  EXPECT_LT(rel_err(y, d.full * x), 1e-13);
  // Without the mbar term.
  sys.apply(x, y);
  auto ref = d.full * x;
  const double c = dot(sys.mbar, x);
  axpy(-c, sys.mbar, ref);
  EXPECT_LT(rel_err(y, ref), 1e-13);
}

TEST_F(SaddleFixture, PreconditionersInvertTheirDenseBlocks) {
  const auto sys = build_system(ops, mask);
  const auto d = dense_saddle(ops, mask);
  InnerConfig dense;
  dense.mode = InnerMode::dense;
  for (auto kind : {PrecondKind::bd, PrecondKind::bdsc, PrecondKind::btdsc}) {
    const BlockPreconditioner pre(sys, kind, dense);
    const auto r = random_vector(sys.size(), 7);
    Vector z(sys.size());
    pre.apply(r, z);
    const auto B = preconditioner_matrix(d, kind);
    EXPECT_LT(rel_err(B * z, r), 1e-10) << to_string(kind);
  }
}

TEST_F(SaddleFixture, AmgInnerSolvesApproximateDenseOnes) {
  const auto sys = build_system(ops, mask);
  InnerConfig dense;
  dense.mode = InnerMode::dense;
  InnerConfig amg;
  amg.tol = 1e-10;
  for (auto kind : {PrecondKind::bd, PrecondKind::bdsc, PrecondKind::btdsc}) {
    const BlockPreconditioner a(sys, kind, amg), b(sys, kind, dense);
    const auto r = random_vector(sys.size(), 8);
    Vector za(sys.size()), zb(sys.size());
    a.apply(r, za);
    b.apply(r, zb);
    EXPECT_LT(rel_err(za, zb), 1e-7) << to_string(kind);
  }
}

TEST_F(SaddleFixture, ShermanWoodburySolveMatchesDenseDirect) {
  const auto d = dense_saddle(ops, mask);
  const auto sys = build_system(ops, mask);
  const auto b = random_vector(ops.size(), 5);
  const auto rhs = saddle_rhs(b);
  const auto ref = LuFactor(d.full).solve(rhs);
  for (auto kind : {PrecondKind::bd, PrecondKind::bdsc, PrecondKind::btdsc}) {
    const auto res = solve_saddle(sys, rhs, kind, {60, 300, 1e-10}, {InnerMode::pcg_amg, 1e-10, 500});
    ASSERT_TRUE(res.converged) << to_string(kind);
    EXPECT_FALSE(res.degenerate);
    Vector got = res.x;
    for (double w : res.w) got.push_back(w / ops.eps);
    EXPECT_LT(rel_err(got, ref), 1e-6) << to_string(kind);
    EXPECT_GT(res.it1, 0);
    EXPECT_GT(res.it2, 0);
  }
}

TEST_F(SaddleFixture, UntruncatedSystemAlsoSolves) {
  const auto none = TruncationMask::none(ops.size());
  const auto d = dense_saddle(ops, none);
  const auto sys = build_system(ops, none);
  const auto rhs = saddle_rhs(random_vector(ops.size(), 6));
  const auto ref = LuFactor(d.full).solve(rhs);
  const auto res = solve_saddle(sys, rhs, PrecondKind::btdsc, {60, 300, 1e-10}, {InnerMode::dense, 1e-7, 500});
  Vector got = res.x;
  for (double w : res.w) got.push_back(w / ops.eps);
  EXPECT_LT(rel_err(got, ref), 1e-6);
}

TEST_F(SaddleFixture, AllTruncatedUsesGuardedPath) {
  const auto all = TruncationMask::from_active(std::vector<bool>(ops.size(), true));
  const auto sys = build_system(ops, all);
  const auto b = random_vector(ops.size(), 9);
  const auto res = solve_saddle(sys, saddle_rhs(b), PrecondKind::bd, {}, {InnerMode::dense, 1e-7, 500});
  EXPECT_TRUE(res.degenerate);
  for (double v : res.x) EXPECT_EQ(v, 0.0);
  // -eta K y = b - mean(b), m^T y = 0 with y = w / eps.
  Vector y = res.w;
  scale(1.0 / ops.eps, y);
  EXPECT_NEAR(dot(ops.m, y), 0.0, 1e-8 * norm2(y));
  auto lhs = ops.K * y;
  scale(-ops.eta, lhs);
  Vector ref = b;
  const double mean = sum(b) / static_cast<double>(b.size());
  for (double& v : ref) v -= mean;
  EXPECT_LT(rel_err(lhs, ref), 1e-9);
}

TEST(Saddle, DefectAndRightHandSide) {
  const auto ops = make_operators(build_uniform_mesh(5), 0.1, 0.01);
  const auto g = random_vector(ops.size(), 1), w = random_vector(ops.size(), 2), u = random_vector(ops.size(), 3);
  const auto d = uzawa_defect(ops, g, w, u);
  auto ref = g;
  axpy(ops.tau, ops.K * w, ref);
  axpy(-1.0, ops.M * u, ref);
  EXPECT_LT(rel_err(d, ref), 1e-15);
  const auto r = saddle_rhs(g);
  ASSERT_EQ(r.size(), 2 * ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    EXPECT_EQ(r[i], 0.0);
    EXPECT_EQ(r[ops.size() + i], g[i]);
  }
}

TEST(Saddle, PrecondNames) {
  EXPECT_EQ(parse_precond_kind("bdsc"), PrecondKind::bdsc);
  EXPECT_EQ(to_string(PrecondKind::btdsc), "btdsc");
  EXPECT_THROW(parse_precond_kind("bogus"), UsageError);
}
