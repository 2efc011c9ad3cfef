#pragma once

#include <span>
#include <utility>

#include "chs/error.hpp"
#include "chs/sparse.hpp"
#include "chs/vector_ops.hpp"

namespace chs {

// Operator base + u v^T. The update is never formed densely; empty u/v means
// no update. Every multilevel operator in the solver has this shape
// (stiffness plus the integral term m m^T), so smoothers and Galerkin
// products work on it directly.
struct RankOneUpdated {
  SparseMatrix base;
  Vector u;
  Vector v;

  RankOneUpdated() = default;
  explicit RankOneUpdated(SparseMatrix b) : base(std::move(b)) {}
  RankOneUpdated(SparseMatrix b, Vector uu, Vector vv)
      : base(std::move(b)), u(std::move(uu)), v(std::move(vv)) {
    require_dim(u.size() == v.size(), "rank-one factors");
    require_dim(u.empty() || u.size() == base.rows(), "rank-one factor length");
  }

  // base + weight * vec vec^T
  static RankOneUpdated symmetric(SparseMatrix b, std::span<const double> vec, double weight) {
    Vector uu(vec.begin(), vec.end());
    scale(weight, uu);
    return RankOneUpdated(std::move(b), std::move(uu), Vector(vec.begin(), vec.end()));
  }

  std::size_t size() const { return base.rows(); }
  bool has_update() const { return !u.empty(); }

  double diagonal(std::size_t i) const {
    return base.at(i, i) + (has_update() ? u[i] * v[i] : 0.0);
  }

  void multiply(std::span<const double> x, std::span<double> y) const {
    base.multiply(x, y);
    if (has_update()) axpy(dot(v, x), u, y);
  }

  Vector operator*(std::span<const double> x) const {
    Vector y(size());
    multiply(x, y);
    return y;
  }

  LinearOp as_op() const {
    return [this](std::span<const double> x, std::span<double> y) { multiply(x, y); };
  }
};

}  // namespace chs
