#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chs/preconditioner.hpp"
#include "chs/scenario.hpp"
#include "chs/uzawa.hpp"

namespace chs {

struct SolverConfig {
  int mesh = 64;  // intervals per side, h = 1/mesh
  double eps = 2e-2;
  double tau = 1e-5;
  PrecondKind precond = PrecondKind::btdsc;
  ScenarioKind scenario = ScenarioKind::random;
  double artificial_fraction = 0.3;
  std::uint64_t seed = 1;
  int n_steps = 20;
  int uzawa_iters = 12;
  int gmres_restart = 60;
  int gmres_max_iters = 300;
  double gmres_tol = 1e-7;
  double inner_tol = 1e-7;
  InnerMode inner_mode = InnerMode::pcg_amg;
  RhoMode rho_mode = RhoMode::bisection;
  double rho_fixed = 1.0;
  std::string out_dir = "out";
  int snapshot_every = 5;  // 0 writes only the first and last snapshot
  // spectra subcommand
  int spectra_mesh = 8;
  int n_masks = 20;
  double mask_fraction = 0.3;

  std::size_t n_side() const { return static_cast<std::size_t>(mesh) + 1; }
  double eta() const { return eps * tau; }
  UzawaConfig uzawa() const;
  Scenario scenario_spec() const;
};

// Every key accepted in config files and as --key flags, in manifest order.
const std::vector<std::string>& config_keys();

// Throws UsageError naming the key for unknown keys and invalid values.
void set_config_value(SolverConfig& cfg, const std::string& key, const std::string& value);
// Throws UsageError for combinations that are individually valid but
// jointly inconsistent.
void validate(const SolverConfig& cfg);

// key=value lines, '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Defaults, then the file (if any), then flags; validated.
SolverConfig parse_config(const std::map<std::string, std::string>& flags,
                          const std::optional<std::string>& file = std::nullopt);

// key = value lines for every key, in config_keys() order.
std::vector<std::pair<std::string, std::string>> effective_values(const SolverConfig& cfg);

std::string to_string(InnerMode mode);
std::string to_string(RhoMode mode);

}  // namespace chs
