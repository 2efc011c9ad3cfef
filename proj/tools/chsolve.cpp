// chsolve: Cahn-Hilliard obstacle solver driver.
//   chsolve evolve   [--config FILE] [--key value ...]
//   chsolve spectra  [--config FILE] [--key value ...]
//   chsolve obstacle [--config FILE] [--key value ...]
// Exit codes: 0 success, 1 solver failure, 2 usage error.

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "chs/config.hpp"
#include "chs/error.hpp"
#include "chs/output.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Overrides {
  std::optional<std::string> config_file;
  std::map<std::string, std::optional<std::string>> values;
};

void add_config_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "key=value config file ('#' comments)");
  for (const auto& key : chs::config_keys()) {
    std::string names = "--" + key;
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (dashed != key) names += ",--" + dashed;
    cmd->add_option(names, o.values[key], "override '" + key + "'");
  }
}

chs::SolverConfig resolve(const Overrides& o) {
  std::map<std::string, std::string> flags;
  for (const auto& [k, v] : o.values)
    if (v) flags[k] = *v;
  return chs::parse_config(flags, o.config_file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cahn-Hilliard obstacle solver: Uzawa iterations with block-preconditioned GMRES"};
  app.require_subcommand(1);

  Overrides evolve_o, spectra_o, obstacle_o;
  auto* evolve = app.add_subcommand("evolve", "time evolution; writes iterations.csv, snapshots, manifest");
  auto* spectra = app.add_subcommand("spectra", "dense eigenvalue certification; writes spectra.csv");
  auto* obstacle = app.add_subcommand("obstacle", "single obstacle solve from the initial data");
  add_config_options(evolve, evolve_o);
  add_config_options(spectra, spectra_o);
  add_config_options(obstacle, obstacle_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (evolve->parsed()) {
      const auto cfg = resolve(evolve_o);
      const auto s = chs::run_evolve(cfg, std::cout);
      std::cout << "max relative mass drift " << s.max_mass_drift << '\n';
      return s.converged ? kExitOk : kExitFailure;
    }
    if (spectra->parsed()) {
      const auto rows = chs::run_spectra(resolve(spectra_o), std::cout);
      bool ok = true;
      for (const auto& r : rows) ok = ok && (r.degenerate || r.report.pass());
      return ok ? kExitOk : kExitFailure;
    }
    const auto s = chs::run_obstacle(resolve(obstacle_o), std::cout);
    return s.result.converged ? kExitOk : kExitFailure;
  } catch (const chs::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
