#include "chs/vector_ops.hpp"

#include <algorithm>
#include <cmath>

#include "chs/error.hpp"
#include "chs/simd.hpp"

namespace chs {

double dot(std::span<const double> x, std::span<const double> y) {
  require_dim(x.size() == y.size(), "dot");
  return simd::active().dot(x.data(), y.data(), x.size());
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  require_dim(x.size() == y.size(), "axpy");
  simd::active().axpy(a, x.data(), y.data(), x.size());
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  require_dim(x.size() == y.size(), "axpby");
  simd::active().axpby(a, x.data(), b, y.data(), x.size());
}

void scale(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

Vector apply(const LinearOp& op, std::span<const double> x) {
  Vector y(x.size());
  op(x, y);
  return y;
}

LinearOp identity_op() {
  return [](std::span<const double> x, std::span<double> y) {
    std::copy(x.begin(), x.end(), y.begin());
  };
}

}  // namespace chs
