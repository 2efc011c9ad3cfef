#include "chs/fem.hpp"

#include <cmath>

#include "chs/error.hpp"

namespace chs {
namespace {

double signed_area(const Triangle& t) {
  return 0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) -
                (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]));
}

Triangle vertices(const Mesh& mesh, std::size_t e) {
  const auto& el = mesh.elements[e];
  return {mesh.nodes[el[0]], mesh.nodes[el[1]], mesh.nodes[el[2]]};
}

template <class ElementFn>
SparseMatrix assemble(const Mesh& mesh, ElementFn element) {
  const std::size_t n = mesh.n_nodes();
  std::vector<Triplet> entries;
  entries.reserve(9 * mesh.elements.size());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const ElementMatrix local = element(vertices(mesh, e));
    const auto& el = mesh.elements[e];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) entries.push_back({el[a], el[b], local[a][b]});
  }
  return SparseMatrix::from_triplets(n, n, std::move(entries));
}

}  // namespace

ElementMatrix element_mass(const Triangle& t) {
  const double area = std::abs(signed_area(t));
  ElementMatrix out{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out[a][b] = area / 12.0 * (a == b ? 2.0 : 1.0);
  return out;
}

ElementMatrix element_stiffness(const Triangle& t) {
  const double area = signed_area(t);
  if (!(std::abs(area) > 1e-300)) throw NumericalError("degenerate triangle in stiffness assembly");
  // grad lambda_i = (b_i, c_i) with b_i = (y_j - y_k)/(2|K|), c_i = (x_k - x_j)/(2|K|), (i,j,k) cyclic.
  std::array<double, 3> b{}, c{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    b[i] = (t[j][1] - t[k][1]) / (2.0 * area);
    c[i] = (t[k][0] - t[j][0]) / (2.0 * area);
  }
  ElementMatrix out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = (b[i] * b[j] + c[i] * c[j]) * std::abs(area);
  return out;
}

SparseMatrix assemble_mass(const Mesh& mesh) { return assemble(mesh, element_mass); }

SparseMatrix assemble_stiffness(const Mesh& mesh) { return assemble(mesh, element_stiffness); }

Vector assemble_m_vector(const Mesh& mesh) {
  Vector m(mesh.n_nodes(), 0.0);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const double third = std::abs(element_area(mesh, e)) / 3.0;
    for (std::size_t p : mesh.elements[e]) m[p] += third;
  }
  return m;
}

FemOperators make_operators(const Mesh& mesh, double eps, double tau) {
  if (!(eps > 0.0) || !(tau > 0.0)) throw InvalidArgument("eps and tau must be positive");
  FemOperators ops;
  ops.M = assemble_mass(mesh);
  ops.K = assemble_stiffness(mesh);
  ops.m = assemble_m_vector(mesh);
  ops.kbar = RankOneUpdated::symmetric(ops.K, ops.m, 1.0);
  ops.eps = eps;
  ops.tau = tau;
  ops.eta = eps * tau;
  return ops;
}

Vector apply_kbar(const FemOperators& ops, std::span<const double> x) {
  require_dim(x.size() == ops.size(), "apply_kbar");
  return ops.kbar * x;
}

}  // namespace chs
