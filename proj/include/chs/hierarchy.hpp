#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "chs/dense.hpp"
#include "chs/rank_one.hpp"
#include "chs/sparse.hpp"

namespace chs {

struct AggregationOptions {
  double strength = 0.25;        // |a_ij| >= strength * sqrt(a_ii a_jj)
  std::size_t max_coarse = 64;   // stop once a level has at most this many unknowns
  double stall_ratio = 0.9;      // stop if n_coarse > stall_ratio * n_fine
  std::size_t max_levels = 30;
  std::size_t isolated_group = 8;  // nodes without couplings are lumped in groups of this size
};

// Aggregate index of every node; `n_aggregates` receives the count.
// Strength is measured on the sparse part only.
std::vector<std::size_t> aggregate_nodes(const SparseMatrix& A, const AggregationOptions& opts,
                                         std::size_t& n_aggregates);

// Piecewise-constant prolongation: P(i, agg[i]) = 1.
SparseMatrix prolongation_from_aggregates(std::span<const std::size_t> agg, std::size_t n_coarse);

// P^T A P, with the rank-one part restricted as (P^T u)(P^T v)^T.
RankOneUpdated galerkin_product(const RankOneUpdated& A, const SparseMatrix& P);

// Level 0 is the finest. prolongation[l] maps level l+1 to level l.
struct Hierarchy {
  std::vector<RankOneUpdated> ops;
  std::vector<SparseMatrix> prolongation;
  std::vector<std::vector<std::size_t>> aggregates;  // aggregates[l][i] = coarse index of node i
  std::vector<Vector> diagonals;                     // diagonal of ops[l] incl. rank-one part

  std::size_t n_levels() const { return ops.size(); }
  std::size_t size() const { return ops.front().size(); }
};

// Throws NumericalError if A is not symmetric or has a non-positive diagonal.
Hierarchy build_aggregation_hierarchy(const RankOneUpdated& A, const AggregationOptions& opts = {});

}  // namespace chs
