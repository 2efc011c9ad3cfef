#include "chs/saddle.hpp"

#include <cmath>

#include "chs/error.hpp"

namespace chs {

TruncatedSaddleSystem build_system(const FemOperators& ops, const TruncationMask& mask) {
  require_dim(mask.size() == ops.size(), "saddle system mask");
  TruncatedSaddleSystem sys;
  sys.ops = &ops;
  sys.mask = mask;
  sys.ahat = truncate_spd(ops.kbar, mask);
  sys.bhat = truncate_rows(ops.M, mask);
  Vector neg_eta_m = ops.m;
  scale(-ops.eta, neg_eta_m);
  sys.neg_c = RankOneUpdated(add(-ops.eta, ops.K, 0.0, ops.K), std::move(neg_eta_m), ops.m);
  const std::size_t n = ops.size();
  sys.mbar.assign(2 * n, 0.0);
  const double s = std::sqrt(ops.eta);
  for (std::size_t i = 0; i < n; ++i) sys.mbar[n + i] = s * ops.m[i];
  return sys;
}

void TruncatedSaddleSystem::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t nn = n();
  require_dim(x.size() == 2 * nn && y.size() == 2 * nn, "saddle apply");
  const auto x1 = x.first(nn), x2 = x.subspan(nn);
  auto y1 = y.first(nn), y2 = y.subspan(nn);
  Vector tmp(nn);
  ahat.multiply(x1, y1);
  bhat.multiply(x2, tmp);
  axpy(1.0, tmp, y1);
  neg_c.multiply(x2, y2);
  bhat.multiply_transpose(x1, tmp);
  axpy(1.0, tmp, y2);
}

void TruncatedSaddleSystem::apply_full(std::span<const double> x, std::span<double> y) const {
  apply(x, y);
  axpy(dot(mbar, x), mbar, y);
}

LinearOp TruncatedSaddleSystem::op() const {
  return [this](std::span<const double> x, std::span<double> y) { apply(x, y); };
}

LinearOp TruncatedSaddleSystem::full_op() const {
  return [this](std::span<const double> x, std::span<double> y) { apply_full(x, y); };
}

Vector saddle_rhs(std::span<const double> b) {
  Vector out(2 * b.size(), 0.0);
  std::copy(b.begin(), b.end(), out.begin() + static_cast<std::ptrdiff_t>(b.size()));
  return out;
}

Vector uzawa_defect(const FemOperators& ops, std::span<const double> g, std::span<const double> w,
                    std::span<const double> u) {
  require_dim(g.size() == ops.size() && w.size() == ops.size() && u.size() == ops.size(),
              "Uzawa defect");
  Vector out(g.begin(), g.end());
  axpy(ops.tau, ops.K * w, out);
  axpy(-1.0, ops.M * u, out);
  return out;
}

}  // namespace chs
