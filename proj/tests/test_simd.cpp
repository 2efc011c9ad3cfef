#include <gtest/gtest.h>

#include <cmath>

#include "chs/random.hpp"
#include "chs/simd.hpp"
#include "chs/sparse.hpp"

using namespace chs;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

const simd::KernelTable* avx2_or_skip() { return simd::avx2_kernels(); }

// Lengths that exercise the vector body and every tail size.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 1001};

}  // namespace

TEST(Simd, ScalarKernelsMatchNaiveLoops) {
  const auto& s = simd::scalar_kernels();
  for (std::size_t n : kLengths) {
    auto x = random_vector(n, 1 + n), y = random_vector(n, 100 + n);
    double ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) ref += x[i] * y[i];
    EXPECT_NEAR(s.dot(x.data(), y.data(), n), ref, 1e-13 * (1.0 + n));

    auto z = y;
    s.axpy(0.5, x.data(), z.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_DOUBLE_EQ(z[i], y[i] + 0.5 * x[i]);

    z = y;
    s.axpby(2.0, x.data(), -3.0, z.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_DOUBLE_EQ(z[i], 2.0 * x[i] - 3.0 * y[i]);

    auto a = x, b = y;
    const double c = std::cos(0.3), sn = std::sin(0.3);
    s.rotate(a.data(), b.data(), n, c, sn);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_DOUBLE_EQ(a[i], c * x[i] - sn * y[i]);
      EXPECT_DOUBLE_EQ(b[i], sn * x[i] + c * y[i]);
    }
  }
}

TEST(Simd, Avx2MatchesScalarReference) {
  const auto* v = avx2_or_skip();
  if (!v) GTEST_SKIP() << "AVX2 not available";
  const auto& s = simd::scalar_kernels();
  for (std::size_t n : kLengths) {
    auto x = random_vector(n, 7 + n), y = random_vector(n, 70 + n);
    EXPECT_NEAR(v->dot(x.data(), y.data(), n), s.dot(x.data(), y.data(), n), 1e-13 * (1.0 + n));

    auto y1 = y, y2 = y;
    s.axpy(-1.25, x.data(), y1.data(), n);
    v->axpy(-1.25, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15);

    y1 = y, y2 = y;
    s.axpby(0.75, x.data(), 1.5, y1.data(), n);
    v->axpby(0.75, x.data(), 1.5, y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15);

    auto a1 = x, b1 = y, a2 = x, b2 = y;
    s.rotate(a1.data(), b1.data(), n, 0.6, 0.8);
    v->rotate(a2.data(), b2.data(), n, 0.6, 0.8);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(a1[i], a2[i], 1e-15);
      EXPECT_NEAR(b1[i], b2[i], 1e-15);
    }
  }
}

TEST(Simd, Avx2SpmvMatchesScalar) {
  const auto* v = avx2_or_skip();
  if (!v) GTEST_SKIP() << "AVX2 not available";
  // Rows of varying length, including empty rows and rows longer than 4.
  Rng rng(3);
  std::vector<Triplet> t;
  const std::size_t n = 200;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = i % 11;
    for (std::size_t k = 0; k < len; ++k) t.push_back({i, rng.index(n), rng.uniform(-1, 1)});
  }
  const auto A = SparseMatrix::from_triplets(n, n, t);
  const auto x = random_vector(n, 9);
  std::vector<double> y1(n), y2(n);
  simd::scalar_kernels().csr_spmv(n, A.row_ptr().data(), A.col_index().data(), A.values().data(),
                                  x.data(), y1.data());
  v->csr_spmv(n, A.row_ptr().data(), A.col_index().data(), A.values().data(), x.data(), y2.data());
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-14);
}

TEST(Simd, ScopedBackendSwitchesAndRestores) {
  const auto before = simd::active().backend;
  {
    simd::ScopedBackend guard(simd::Backend::scalar);
    EXPECT_EQ(simd::active().backend, simd::Backend::scalar);
  }
  EXPECT_EQ(simd::active().backend, before);
  const auto backends = simd::available_backends();
  ASSERT_FALSE(backends.empty());
  EXPECT_EQ(backends.front(), simd::Backend::scalar);
  EXPECT_EQ(simd::backend_name(simd::Backend::avx2), "avx2");
}
