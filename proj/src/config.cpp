#include "chs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "chs/error.hpp"

namespace chs {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  throw UsageError("invalid value '" + value + "' for " + key + ": " + why);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value, "expected a number");
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value, "expected an integer");
  return out;
}

int parse_count(const std::string& key, const std::string& value, long long lo) {
  const long long v = parse_int(key, value);
  if (v < lo || v > std::numeric_limits<int>::max())
    bad_value(key, value, "must be at least " + std::to_string(lo));
  return static_cast<int>(v);
}

double parse_positive(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (!(v > 0.0) || !std::isfinite(v)) bad_value(key, value, "must be positive");
  return v;
}

double parse_tolerance(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (!(v > 0.0 && v < 1.0)) bad_value(key, value, "must lie in (0, 1)");
  return v;
}

double parse_fraction(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (!(v >= 0.0 && v <= 1.0)) bad_value(key, value, "must lie in [0, 1]");
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string to_string(InnerMode mode) { return mode == InnerMode::dense ? "dense" : "pcg_amg"; }
std::string to_string(RhoMode mode) { return mode == RhoMode::fixed ? "fixed" : "bisection"; }

UzawaConfig SolverConfig::uzawa() const {
  UzawaConfig u;
  u.iterations = uzawa_iters;
  u.precond = precond;
  u.gmres = {gmres_restart, gmres_max_iters, gmres_tol};
  u.inner.mode = inner_mode;
  u.inner.tol = inner_tol;
  u.rho_mode = rho_mode;
  u.rho_fixed = rho_fixed;
  return u;
}

Scenario SolverConfig::scenario_spec() const {
  Scenario s;
  s.kind = scenario;
  s.seed = seed;
  s.artificial_fraction = artificial_fraction;
  return s;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "mesh",          "eps",           "tau",        "precond",         "scenario",
      "artificial_fraction", "seed",    "n_steps",    "uzawa_iters",     "gmres_restart",
      "gmres_max_iters", "gmres_tol",   "inner_tol",  "inner_mode",      "rho_mode",
      "rho_fixed",     "out_dir",       "snapshot_every", "spectra_mesh", "n_masks",
      "mask_fraction"};
  return keys;
}

void set_config_value(SolverConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "mesh") {
    cfg.mesh = parse_count(key, value, 1);
  } else if (key == "eps") {
    cfg.eps = parse_positive(key, value);
  } else if (key == "tau") {
    cfg.tau = parse_positive(key, value);
  } else if (key == "precond") {
    cfg.precond = parse_precond_kind(value);
  } else if (key == "scenario") {
    cfg.scenario = parse_scenario_kind(value);
  } else if (key == "artificial_fraction") {
    cfg.artificial_fraction = parse_fraction(key, value);
  } else if (key == "seed") {
    const long long v = parse_int(key, value);
    if (v < 0) bad_value(key, value, "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(v);
  } else if (key == "n_steps") {
    cfg.n_steps = parse_count(key, value, 1);
  } else if (key == "uzawa_iters") {
    cfg.uzawa_iters = parse_count(key, value, 1);
  } else if (key == "gmres_restart") {
    cfg.gmres_restart = parse_count(key, value, 1);
  } else if (key == "gmres_max_iters") {
    cfg.gmres_max_iters = parse_count(key, value, 1);
  } else if (key == "gmres_tol") {
    cfg.gmres_tol = parse_tolerance(key, value);
  } else if (key == "inner_tol") {
    cfg.inner_tol = parse_tolerance(key, value);
  } else if (key == "inner_mode") {
    if (value == "pcg_amg") cfg.inner_mode = InnerMode::pcg_amg;
    else if (value == "dense") cfg.inner_mode = InnerMode::dense;
    else bad_value(key, value, "expected pcg_amg or dense");
  } else if (key == "rho_mode") {
    if (value == "bisection") cfg.rho_mode = RhoMode::bisection;
    else if (value == "fixed") cfg.rho_mode = RhoMode::fixed;
    else bad_value(key, value, "expected bisection or fixed");
  } else if (key == "rho_fixed") {
    cfg.rho_fixed = parse_positive(key, value);
  } else if (key == "out_dir") {
    if (value.empty()) bad_value(key, value, "must not be empty");
    cfg.out_dir = value;
  } else if (key == "snapshot_every") {
    cfg.snapshot_every = parse_count(key, value, 0);
  } else if (key == "spectra_mesh") {
    cfg.spectra_mesh = parse_count(key, value, 1);
  } else if (key == "n_masks") {
    cfg.n_masks = parse_count(key, value, 0);
  } else if (key == "mask_fraction") {
    cfg.mask_fraction = parse_fraction(key, value);
  } else {
    throw UsageError("unknown configuration key '" + key + "'");
  }
}

void validate(const SolverConfig& cfg) {
  if (cfg.gmres_restart > cfg.gmres_max_iters)
    throw UsageError("gmres_restart (" + std::to_string(cfg.gmres_restart) +
                     ") exceeds gmres_max_iters (" + std::to_string(cfg.gmres_max_iters) + ")");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

SolverConfig parse_config(const std::map<std::string, std::string>& flags,
                          const std::optional<std::string>& file) {
  SolverConfig cfg;
  if (file) {
    for (const auto& [k, v] : read_config_file(*file)) set_config_value(cfg, k, v);
  }
  for (const auto& [k, v] : flags) set_config_value(cfg, k, v);
  validate(cfg);
  return cfg;
}

std::vector<std::pair<std::string, std::string>> effective_values(const SolverConfig& c) {
  return {{"mesh", std::to_string(c.mesh)},
          {"eps", fmt(c.eps)},
          {"tau", fmt(c.tau)},
          {"precond", to_string(c.precond)},
          {"scenario", to_string(c.scenario)},
          {"artificial_fraction", fmt(c.artificial_fraction)},
          {"seed", std::to_string(c.seed)},
          {"n_steps", std::to_string(c.n_steps)},
          {"uzawa_iters", std::to_string(c.uzawa_iters)},
          {"gmres_restart", std::to_string(c.gmres_restart)},
          {"gmres_max_iters", std::to_string(c.gmres_max_iters)},
          {"gmres_tol", fmt(c.gmres_tol)},
          {"inner_tol", fmt(c.inner_tol)},
          {"inner_mode", to_string(c.inner_mode)},
          {"rho_mode", to_string(c.rho_mode)},
          {"rho_fixed", fmt(c.rho_fixed)},
          {"out_dir", c.out_dir},
          {"snapshot_every", std::to_string(c.snapshot_every)},
          {"spectra_mesh", std::to_string(c.spectra_mesh)},
          {"n_masks", std::to_string(c.n_masks)},
          {"mask_fraction", fmt(c.mask_fraction)}};
}

}  // namespace chs
