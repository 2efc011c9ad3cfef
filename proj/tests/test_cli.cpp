#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "chs/config.hpp"
#include "chs/error.hpp"
#include "chs/output.hpp"

using namespace chs;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("chs_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Drops the last (time_s) column of every row.
std::string without_time(const std::string& csv) {
  std::string out;
  for (const auto& line : lines_of(csv)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CHSOLVE_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsMatchTheReferenceSettings) {
  const auto cfg = parse_config({});
  EXPECT_EQ(cfg.eps, 0.02);
  EXPECT_EQ(cfg.tau, 1e-5);
  EXPECT_EQ(cfg.precond, PrecondKind::btdsc);
  EXPECT_EQ(cfg.gmres_restart, 60);
  EXPECT_EQ(cfg.gmres_max_iters, 300);
  EXPECT_EQ(cfg.gmres_tol, 1e-7);
  EXPECT_EQ(cfg.inner_tol, 1e-7);
  EXPECT_EQ(cfg.uzawa_iters, 12);
  EXPECT_EQ(cfg.rho_mode, RhoMode::bisection);
  EXPECT_EQ(cfg.scenario, ScenarioKind::random);
  const auto u = cfg.uzawa();
  EXPECT_EQ(u.iterations, 12);
  EXPECT_EQ(u.gmres.restart, 60);
}

TEST(Config, InvalidValuesAreUsageErrors) {
  EXPECT_THROW(parse_config({{"precond", "bogus"}}), UsageError);
  EXPECT_THROW(parse_config({{"eps", "-1"}}), UsageError);
  EXPECT_THROW(parse_config({{"gmres_tol", "1.5"}}), UsageError);
  EXPECT_THROW(parse_config({{"mesh", "abc"}}), UsageError);
  EXPECT_THROW(parse_config({{"colour", "red"}}), UsageError);
  EXPECT_THROW(parse_config({{"gmres_restart", "80"}, {"gmres_max_iters", "60"}}), UsageError);
}

TEST(Config, FlagOverridesFile) {
  const auto dir = fresh_dir("config");
  fs::create_directories(dir);
  const auto file = dir / "run.cfg";
  std::ofstream(file) << "# comment line\nprecond = bd\nmesh=32  # trailing comment\n\ntau = 1e-4\n";
  const auto from_file = parse_config({}, file.string());
  EXPECT_EQ(from_file.precond, PrecondKind::bd);
  EXPECT_EQ(from_file.mesh, 32);
  EXPECT_EQ(from_file.tau, 1e-4);
  const auto both = parse_config({{"precond", "bdsc"}}, file.string());
  EXPECT_EQ(both.precond, PrecondKind::bdsc);
  EXPECT_EQ(both.mesh, 32);

  std::ofstream(dir / "bad.cfg") << "unknown_key = 3\n";
  EXPECT_THROW(parse_config({}, (dir / "bad.cfg").string()), UsageError);
  std::ofstream(dir / "bad2.cfg") << "just words\n";
  EXPECT_THROW(parse_config({}, (dir / "bad2.cfg").string()), UsageError);
  EXPECT_THROW(parse_config({}, (dir / "missing.cfg").string()), UsageError);
}

TEST(Config, EffectiveValuesCoverEveryKey) {
  const auto values = effective_values(SolverConfig{});
  ASSERT_EQ(values.size(), config_keys().size());
  for (std::size_t i = 0; i < values.size(); ++i) EXPECT_EQ(values[i].first, config_keys()[i]);
  // Round trip through set_config_value.
  SolverConfig cfg;
  for (const auto& [k, v] : effective_values(SolverConfig{})) set_config_value(cfg, k, v);
  EXPECT_EQ(effective_values(cfg), values);
}

TEST(Output, GrayLevelsAndPgmLayout) {
  EXPECT_EQ(gray_level(-1.0), 0);
  EXPECT_EQ(gray_level(1.0), 255);
  EXPECT_EQ(gray_level(0.0), 128);
  const auto dir = fresh_dir("pgm");
  fs::create_directories(dir);
  const auto mesh = build_uniform_mesh(3);
  Vector u(9, -1.0);
  u[mesh.node(0, 2)] = 1.0;  // top-left corner
  write_pgm(dir / "u.pgm", mesh, u);
  const auto data = slurp(dir / "u.pgm");
  const std::string header = "P5\n3 3\n255\n";
  ASSERT_EQ(data.size(), header.size() + 9);
  EXPECT_EQ(data.substr(0, header.size()), header);
  EXPECT_EQ(static_cast<unsigned char>(data[header.size()]), 255);
  EXPECT_EQ(static_cast<unsigned char>(data[header.size() + 1]), 0);
  write_field_csv(dir / "u.csv", mesh, u);
  EXPECT_EQ(lines_of(slurp(dir / "u.csv")).front(), "1,-1,-1");
}

TEST(Output, EvolveWritesTablesSnapshotsAndManifest) {
  const auto dir = fresh_dir("evolve");
  SolverConfig cfg;
  cfg.mesh = 16;
  cfg.eps = 0.05;
  cfg.tau = 1e-4;
  cfg.n_steps = 4;
  cfg.snapshot_every = 2;
  cfg.scenario = ScenarioKind::square;
  cfg.out_dir = dir.string();
  std::ostringstream log;
  const auto s = run_evolve(cfg, log);
  EXPECT_TRUE(s.converged);
  EXPECT_LE(s.max_mass_drift, 1e-10);

  const auto rows = lines_of(slurp(dir / "iterations.csv"));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], kIterationsHeader);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    std::istringstream in(rows[k]);
    std::string tstep, ntrunc, pct;
    std::getline(in, tstep, ',');
    std::getline(in, ntrunc, ',');
    std::getline(in, pct, ',');
    EXPECT_EQ(std::stoi(tstep), static_cast<int>(k));
    EXPECT_NEAR(std::stod(pct), 100.0 * std::stod(ntrunc) / 289.0, 0.01);
  }
  for (const char* name : {"u_0.pgm", "u_2.pgm", "u_4.pgm", "u_0.csv", "u_4.csv", "manifest.txt"})
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  EXPECT_FALSE(fs::exists(dir / "u_1.pgm"));

  const auto manifest = slurp(dir / "manifest.txt");
  for (const auto& key : config_keys()) EXPECT_NE(manifest.find(key + " = "), std::string::npos) << key;

  // Same configuration, same bytes apart from time_s.
  const auto first = slurp(dir / "iterations.csv");
  const auto snap = slurp(dir / "u_4.csv");
  run_evolve(cfg, log);
  EXPECT_EQ(without_time(first), without_time(slurp(dir / "iterations.csv")));
  EXPECT_EQ(snap, slurp(dir / "u_4.csv"));
}

TEST(Output, UnwritableDirectoryFailsBeforeCompute) {
  const auto dir = fresh_dir("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  SolverConfig cfg;
  cfg.out_dir = (dir / "file" / "sub").string();
  std::ostringstream log;
  EXPECT_THROW(run_evolve(cfg, log), IoError);
  EXPECT_TRUE(log.str().empty());
}

TEST(Output, SpectraCsv) {
  const auto dir = fresh_dir("spectra");
  SolverConfig cfg;
  cfg.spectra_mesh = 4;
  cfg.n_masks = 2;
  cfg.out_dir = dir.string();
  std::ostringstream log;
  const auto rows = run_spectra(cfg, log);
  ASSERT_EQ(rows.size(), 4u + 4u + 1u);
  const auto lines = lines_of(slurp(dir / "spectra.csv"));
  ASSERT_EQ(lines.size(), rows.size() + 1);
  EXPECT_EQ(lines[0], kSpectraHeader);
  EXPECT_EQ(lines[1].substr(0, 14), "bd,1/4,none,-0");
  EXPECT_NE(lines.back().find(",degenerate"), std::string::npos);
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) EXPECT_EQ(lines[i].substr(lines[i].rfind(',') + 1), "true");
  cfg.spectra_mesh = 32;
  EXPECT_THROW(run_spectra(cfg, log), InvalidArgument);
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("cli");
  EXPECT_EQ(run_cli("evolve --precond bogus"), 2);
  EXPECT_EQ(run_cli("evolve --no-such-flag 1"), 2);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("spectra --spectra_mesh 4 --n_masks 1 --out_dir " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "spectra.csv"));
  EXPECT_EQ(run_cli("obstacle --mesh 16 --scenario square --out_dir " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "u_obstacle.pgm"));
  EXPECT_EQ(run_cli("evolve --mesh 8 --n-steps 1 --eps 0.05 --out_dir " + dir.string()), 0);
  EXPECT_EQ(run_cli("spectra --spectra_mesh 40 --out_dir " + dir.string()), 1);
}
