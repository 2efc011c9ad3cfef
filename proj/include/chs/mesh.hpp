#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace chs {

// Uniform P1 triangulation of the unit square. Node p = j * n_side + i sits
// at (i h, j h); each grid square is split along its lower-left to
// upper-right diagonal into two counter-clockwise triangles.
struct Mesh {
  std::size_t n_side = 0;
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<std::size_t, 3>> elements;

  std::size_t n_nodes() const { return nodes.size(); }
  double h() const { return 1.0 / static_cast<double>(n_side - 1); }
  std::size_t node(std::size_t i, std::size_t j) const { return j * n_side + i; }
};

Mesh build_uniform_mesh(std::size_t n_side);

// Signed area of element e (positive for counter-clockwise vertices).
double element_area(const Mesh& mesh, std::size_t e);

}  // namespace chs
