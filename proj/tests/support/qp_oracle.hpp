#pragma once

// Brute-force minimiser of 1/2 x^T A x - b^T x over a box: every assignment
// of each unknown to {lower, upper, free} is tried, the free unknowns are
// solved for, and the feasible candidate with the lowest energy wins.
// 3^n candidates, so n <= 12.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "chs/dense.hpp"
#include "chs/obstacle.hpp"

namespace chs::oracle {

struct QpSolution {
  Vector x;
  double energy = std::numeric_limits<double>::infinity();
};

inline QpSolution brute_force_box_qp(const DenseMatrix& A, std::span<const double> b,
                                     const ObstacleBounds& bounds) {
  const std::size_t n = A.rows();
  if (n > 12) throw std::invalid_argument("brute-force QP limited to n <= 12");
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;

  QpSolution best;
  std::vector<int> state(n);
  Vector x(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i) {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
      if (state[i] == 0) x[i] = bounds.lower[i];
      else if (state[i] == 1) x[i] = bounds.upper[i];
      else free.push_back(i);
    }
    if (!free.empty()) {
      const std::size_t k = free.size();
      DenseMatrix Aff(k, k);
      Vector rhs(k);
      for (std::size_t a = 0; a < k; ++a) {
        rhs[a] = b[free[a]];
        for (std::size_t j = 0; j < n; ++j)
          if (state[j] != 2) rhs[a] -= A(free[a], j) * x[j];
        for (std::size_t bb = 0; bb < k; ++bb) Aff(a, bb) = A(free[a], free[bb]);
      }
      const Vector xf = Cholesky(Aff).solve(rhs);
      for (std::size_t a = 0; a < k; ++a) x[free[a]] = xf[a];
    }
    bool feasible = true;
    for (std::size_t i = 0; i < n; ++i)
      feasible = feasible && x[i] >= bounds.lower[i] - 1e-14 && x[i] <= bounds.upper[i] + 1e-14;
    if (!feasible) continue;
    const Vector Ax = A * x;
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += 0.5 * x[i] * Ax[i] - b[i] * x[i];
    if (e < best.energy) {
      best.energy = e;
      best.x = x;
    }
  }
  return best;
}

}  // namespace chs::oracle
