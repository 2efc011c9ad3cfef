#include "chs/mesh.hpp"

#include "chs/error.hpp"

namespace chs {

Mesh build_uniform_mesh(std::size_t n_side) {
  if (n_side < 2) throw InvalidArgument("mesh needs at least 2 nodes per side");
  Mesh mesh;
  mesh.n_side = n_side;
  const double h = mesh.h();
  mesh.nodes.reserve(n_side * n_side);
  for (std::size_t j = 0; j < n_side; ++j) {
    for (std::size_t i = 0; i < n_side; ++i) {
      // Pin the last coordinate to exactly 1 rather than accumulating i*h.
      const double x = (i + 1 == n_side) ? 1.0 : static_cast<double>(i) * h;
      const double y = (j + 1 == n_side) ? 1.0 : static_cast<double>(j) * h;
      mesh.nodes.push_back({x, y});
    }
  }
  mesh.elements.reserve(2 * (n_side - 1) * (n_side - 1));
  for (std::size_t j = 0; j + 1 < n_side; ++j) {
    for (std::size_t i = 0; i + 1 < n_side; ++i) {
      const std::size_t a = mesh.node(i, j);
      const std::size_t b = mesh.node(i + 1, j);
      const std::size_t c = mesh.node(i + 1, j + 1);
      const std::size_t d = mesh.node(i, j + 1);
      mesh.elements.push_back({a, b, c});
      mesh.elements.push_back({a, c, d});
    }
  }
  return mesh;
}

double element_area(const Mesh& mesh, std::size_t e) {
  const auto& [a, b, c] = mesh.elements.at(e);
  const auto& pa = mesh.nodes[a];
  const auto& pb = mesh.nodes[b];
  const auto& pc = mesh.nodes[c];
  return 0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]));
}

}  // namespace chs
