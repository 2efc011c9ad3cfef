#include "chs/hierarchy.hpp"

#include <cmath>
#include <limits>

#include "chs/error.hpp"

namespace chs {
namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

Vector full_diagonal(const RankOneUpdated& A) {
  Vector d = A.base.diagonal();
  if (A.has_update())
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += A.u[i] * A.v[i];
  return d;
}

}  // namespace

std::vector<std::size_t> aggregate_nodes(const SparseMatrix& A, const AggregationOptions& opts,
                                         std::size_t& n_aggregates) {
  const std::size_t n = A.rows();
  const Vector d = A.diagonal();

  // Strong neighbours, self excluded.
  std::vector<std::vector<std::size_t>> strong(n);
  std::vector<bool> coupled(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = A.row_cols(i);
    const auto vals = A.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t j = cols[k];
      if (j == i || vals[k] == 0.0) continue;
      coupled[i] = true;
      const double dd = d[i] * d[j];
      if (dd > 0.0 && std::abs(vals[k]) >= opts.strength * std::sqrt(dd)) strong[i].push_back(j);
    }
  }

  std::vector<std::size_t> agg(n, kUnassigned);
  n_aggregates = 0;

  // Pass 1: a node whose strong neighbourhood is entirely free seeds an aggregate.
  for (std::size_t i = 0; i < n; ++i) {
    if (agg[i] != kUnassigned || strong[i].empty()) continue;
    bool all_free = true;
    for (std::size_t j : strong[i]) all_free = all_free && agg[j] == kUnassigned;
    if (!all_free) continue;
    agg[i] = n_aggregates;
    for (std::size_t j : strong[i]) agg[j] = n_aggregates;
    ++n_aggregates;
  }

  // Pass 2: leftovers join the aggregate of their strongest aggregated neighbour.
  const std::vector<std::size_t> seeded = agg;
  for (std::size_t i = 0; i < n; ++i) {
    if (agg[i] != kUnassigned) continue;
    double best = 0.0;
    std::size_t target = kUnassigned;
    const auto cols = A.row_cols(i);
    const auto vals = A.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t j = cols[k];
      if (j == i || seeded[j] == kUnassigned) continue;
      bool is_strong = false;
      for (std::size_t s : strong[i]) is_strong = is_strong || s == j;
      if (is_strong && std::abs(vals[k]) > best) {
        best = std::abs(vals[k]);
        target = seeded[j];
      }
    }
    agg[i] = target;
  }

  // Pass 3: coupled leftovers become singletons; uncoupled nodes (e.g. unit
  // rows of truncated operators) are lumped so they do not stall coarsening.
  std::size_t open_group = kUnassigned, group_fill = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (agg[i] != kUnassigned) continue;
    if (coupled[i]) {
      agg[i] = n_aggregates++;
      continue;
    }
    if (open_group == kUnassigned || group_fill == opts.isolated_group) {
      open_group = n_aggregates++;
      group_fill = 0;
    }
    agg[i] = open_group;
    ++group_fill;
  }
  return agg;
}

SparseMatrix prolongation_from_aggregates(std::span<const std::size_t> agg, std::size_t n_coarse) {
  const std::size_t n = agg.size();
  std::vector<std::size_t> row_ptr(n + 1), col(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (agg[i] >= n_coarse) throw DimensionError("aggregate index out of range");
    row_ptr[i + 1] = i + 1;
    col[i] = agg[i];
  }
  return SparseMatrix::from_csr(n, n_coarse, std::move(row_ptr), std::move(col), Vector(n, 1.0));
}

RankOneUpdated galerkin_product(const RankOneUpdated& A, const SparseMatrix& P) {
  require_dim(P.rows() == A.size(), "Galerkin product");
  const SparseMatrix coarse = multiply(P.transpose(), multiply(A.base, P));
  if (!A.has_update()) return RankOneUpdated(coarse);
  Vector u(P.cols()), v(P.cols());
  P.multiply_transpose(A.u, u);
  P.multiply_transpose(A.v, v);
  return RankOneUpdated(coarse, std::move(u), std::move(v));
}

Hierarchy build_aggregation_hierarchy(const RankOneUpdated& A, const AggregationOptions& opts) {
  if (A.base.rows() != A.base.cols()) throw DimensionError("hierarchy needs a square operator");
  if (!A.base.is_symmetric(1e-12)) throw NumericalError("hierarchy needs a symmetric operator");
  Hierarchy h;
  h.ops.push_back(A);
  h.diagonals.push_back(full_diagonal(A));
  for (double di : h.diagonals.back())
    if (!(di > 0.0)) throw NumericalError("hierarchy needs a positive diagonal");

  while (h.ops.back().size() > opts.max_coarse && h.ops.size() < opts.max_levels) {
    const RankOneUpdated& fine = h.ops.back();
    std::size_t n_coarse = 0;
    auto agg = aggregate_nodes(fine.base, opts, n_coarse);
    if (static_cast<double>(n_coarse) > opts.stall_ratio * static_cast<double>(fine.size())) break;
    SparseMatrix P = prolongation_from_aggregates(agg, n_coarse);
    RankOneUpdated coarse = galerkin_product(fine, P);
    h.prolongation.push_back(std::move(P));
    h.aggregates.push_back(std::move(agg));
    h.diagonals.push_back(full_diagonal(coarse));
    h.ops.push_back(std::move(coarse));
  }
  return h;
}

}  // namespace chs
