#pragma once

#include <functional>
#include <span>

#include "chs/vector_ops.hpp"

namespace chs {

// Result of one application of a (possibly iterative) inverse.
struct BaseSolve {
  Vector x;
  int iterations = 0;
  bool converged = true;
  double rel_residual = 0.0;
};

using BaseSolver = std::function<BaseSolve(std::span<const double> rhs)>;

struct WoodburyResult {
  Vector x;
  BaseSolve first;   // base^{-1} b
  BaseSolve second;  // base^{-1} u
  double denominator = 1.0;
};

inline constexpr double kWoodburySingularTol = 1e-12;

// Solves (base + u v^T) x = b with two base solves:
//   z1 = base^{-1} b, z2 = base^{-1} u, x = z1 - z2 (v^T z1) / (1 + v^T z2).
// With u = 0 the second solve is skipped and x = z1. Throws NumericalError
// when |1 + v^T z2| < 1e-12.
WoodburyResult sherman_woodbury_solve(const BaseSolver& solve_base, std::span<const double> u,
                                      std::span<const double> v, std::span<const double> b);

}  // namespace chs
