#include "chs/scenario.hpp"

#include <cmath>

#include "chs/error.hpp"
#include "chs/random.hpp"
#include "chs/truncation.hpp"

namespace chs {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::random: return "random";
    case ScenarioKind::square: return "square";
    case ScenarioKind::artificial: return "artificial";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "random") return ScenarioKind::random;
  if (name == "square") return ScenarioKind::square;
  if (name == "artificial") return ScenarioKind::artificial;
  throw UsageError("unknown scenario '" + name + "' (expected random, square or artificial)");
}

Vector init_scenario(const Mesh& mesh, const Scenario& sc) {
  if (!(sc.low >= -1.0 && sc.low <= sc.high && sc.high <= 1.0))
    throw InvalidArgument("scenario value range must lie inside [-1, 1]");
  const std::size_t n = mesh.n_nodes();
  Rng rng(sc.seed);
  Vector u(n);
  for (double& v : u) v = rng.uniform(sc.low, sc.high);

  switch (sc.kind) {
    case ScenarioKind::random:
      u.front() = 1.0;
      u.back() = -1.0;
      break;
    case ScenarioKind::square: {
      const double grow = 10.0 * mesh.h() * mesh.h();
      auto inside = [](const std::array<double, 2>& p, double lo, double hi) {
        return p[0] >= lo && p[0] <= hi && p[1] >= lo && p[1] <= hi;
      };
      for (std::size_t p = 0; p < n; ++p) {
        if (inside(mesh.nodes[p], 0.25, 0.75)) {
          u[p] = 1.0;
        } else if (!inside(mesh.nodes[p], 0.25 - grow, 0.75 + grow)) {
          u[p] = -1.0;
        }
      }
      break;
    }
    case ScenarioKind::artificial: {
      const TruncationMask pinned = random_mask(n, sc.artificial_fraction, sc.seed ^ 0x9e3779b97f4a7c15ULL);
      for (std::size_t p = 0; p < n; ++p)
        if (pinned.is_active(p)) u[p] = rng.uniform() < 0.5 ? -1.0 : 1.0;
      break;
    }
  }
  return u;
}

}  // namespace chs
