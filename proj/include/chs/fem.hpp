#pragma once

#include <array>
#include <span>

#include "chs/mesh.hpp"
#include "chs/rank_one.hpp"
#include "chs/sparse.hpp"

namespace chs {

using ElementMatrix = std::array<std::array<double, 3>, 3>;
using Triangle = std::array<std::array<double, 2>, 3>;

// P1 element matrices on one triangle.
ElementMatrix element_mass(const Triangle& t);
ElementMatrix element_stiffness(const Triangle& t);

SparseMatrix assemble_mass(const Mesh& mesh);
// Neumann Laplacian; throws NumericalError on a degenerate triangle.
SparseMatrix assemble_stiffness(const Mesh& mesh);
// m_p = integral of the hat function of node p.
Vector assemble_m_vector(const Mesh& mesh);

// Discrete operators of the Cahn-Hilliard step. kbar is K + m m^T kept as a
// sparse matrix plus rank-one update.
struct FemOperators {
  SparseMatrix M;
  SparseMatrix K;
  Vector m;
  RankOneUpdated kbar;
  double eps = 0.0;
  double tau = 0.0;
  double eta = 0.0;  // eps * tau

  std::size_t size() const { return m.size(); }
};

FemOperators make_operators(const Mesh& mesh, double eps, double tau);

// K x + m (m^T x)
Vector apply_kbar(const FemOperators& ops, std::span<const double> x);

}  // namespace chs
