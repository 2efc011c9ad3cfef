#include "chs/sherman_woodbury.hpp"

#include <algorithm>
#include <cmath>

#include "chs/error.hpp"

namespace chs {

WoodburyResult sherman_woodbury_solve(const BaseSolver& solve_base, std::span<const double> u,
                                      std::span<const double> v, std::span<const double> b) {
  require_dim(u.size() == b.size() && v.size() == b.size(), "Sherman-Woodbury vectors");
  WoodburyResult out;
  out.first = solve_base(b);
  require_dim(out.first.x.size() == b.size(), "base solve result");

  const bool zero_update = std::all_of(u.begin(), u.end(), [](double s) { return s == 0.0; });
  if (zero_update) {
    out.x = out.first.x;
    out.second = BaseSolve{};
    out.second.iterations = 0;
    return out;
  }

  out.second = solve_base(u);
  out.denominator = 1.0 + dot(v, out.second.x);
  if (std::abs(out.denominator) < kWoodburySingularTol) {
    throw NumericalError("Sherman-Woodbury: singular rank-one update (1 + v^T base^{-1} u ~ 0)");
  }
  out.x = out.first.x;
  axpy(-dot(v, out.first.x) / out.denominator, out.second.x, out.x);
  return out;
}

}  // namespace chs
