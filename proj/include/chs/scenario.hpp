#pragma once

#include <cstdint>
#include <string>

#include "chs/mesh.hpp"
#include "chs/vector_ops.hpp"

namespace chs {

enum class ScenarioKind { random, square, artificial };

std::string to_string(ScenarioKind kind);
// Throws UsageError for unknown names.
ScenarioKind parse_scenario_kind(const std::string& name);

struct Scenario {
  ScenarioKind kind = ScenarioKind::random;
  std::uint64_t seed = 1;
  double low = -0.3;                 // range of the random values
  double high = 0.5;
  double artificial_fraction = 0.3;  // share of nodes pinned to +-1 (artificial)
};

// Nodal initial data:
//   random:     uniform in [low, high], first node +1, last node -1
//   square:     +1 on [0.25, 0.75]^2, -1 outside that square grown by 10 h^2,
//               uniform in [low, high] in between
//   artificial: uniform in [low, high] with a seeded subset of
//               round(fraction * n) nodes pinned to +1 or -1
Vector init_scenario(const Mesh& mesh, const Scenario& scenario);

}  // namespace chs
