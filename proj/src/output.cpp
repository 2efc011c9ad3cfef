#include "chs/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "chs/error.hpp"
#include "chs/fem.hpp"
#include "chs/truncation.hpp"

namespace chs {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

bool snapshot_due(int k, int last, int every) {
  if (k == 0 || k == last) return true;
  return every > 0 && k % every == 0;
}

void write_snapshot(const std::filesystem::path& dir, const std::string& tag, const Mesh& mesh,
                    std::span<const double> u) {
  write_pgm(dir / ("u_" + tag + ".pgm"), mesh, u);
  write_field_csv(dir / ("u_" + tag + ".csv"), mesh, u);
}

}  // namespace

unsigned char gray_level(double u) {
  const double v = std::round(255.0 * (u + 1.0) / 2.0);
  return static_cast<unsigned char>(std::clamp(v, 0.0, 255.0));
}

void write_pgm(const std::filesystem::path& path, const Mesh& mesh, std::span<const double> u) {
  require_dim(u.size() == mesh.n_nodes(), "snapshot field");
  auto out = open_out(path, true);
  const std::size_t s = mesh.n_side;
  out << "P5\n" << s << ' ' << s << "\n255\n";
  std::vector<char> row(s);
  for (std::size_t j = s; j-- > 0;) {
    for (std::size_t i = 0; i < s; ++i) row[i] = static_cast<char>(gray_level(u[mesh.node(i, j)]));
    out.write(row.data(), static_cast<std::streamsize>(s));
  }
  close_checked(out, path);
}

void write_field_csv(const std::filesystem::path& path, const Mesh& mesh, std::span<const double> u) {
  require_dim(u.size() == mesh.n_nodes(), "snapshot field");
  auto out = open_out(path);
  const std::size_t s = mesh.n_side;
  for (std::size_t j = s; j-- > 0;) {
    for (std::size_t i = 0; i < s; ++i) {
      if (i) out << ',';
      out << fmt("%.17g", u[mesh.node(i, j)]);
    }
    out << '\n';
  }
  close_checked(out, path);
}

std::string iterations_row(const StepReport& r) {
  return std::to_string(r.tstep) + ',' + std::to_string(r.ntrunc) + ',' + fmt("%.2f", r.pct_trunc) +
         ',' + std::to_string(r.it1) + ',' + std::to_string(r.it2) + ',' + fmt("%.3f", r.time_s);
}

std::string spectra_row(const SpectraRow& row) {
  const auto& r = row.report;
  const std::string pass = row.degenerate ? "degenerate" : (r.pass() ? "true" : "false");
  return row.precond + ',' + row.mesh + ',' + row.mask_seed + ',' + fmt("%.12g", r.lambda_min) + ',' +
         fmt("%.12g", r.lambda_max) + ',' + fmt("%.12g", r.kappa) + ',' + fmt("%.12g", r.bound_lo) +
         ',' + fmt("%.12g", r.bound_hi) + ',' + pass;
}

void prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const SolverConfig& cfg, const std::vector<std::pair<std::string, std::string>>& extra) {
  auto out = open_out(path);
  out << "command = " << command << '\n';
  for (const auto& [k, v] : effective_values(cfg)) out << k << " = " << v << '\n';
  for (const auto& [k, v] : extra) out << k << " = " << v << '\n';
  close_checked(out, path);
}

EvolveSummary run_evolve(const SolverConfig& cfg, std::ostream& log) {
  const std::filesystem::path dir = cfg.out_dir;
  prepare_out_dir(dir);

  const Mesh mesh = build_uniform_mesh(cfg.n_side());
  const FemOperators ops = make_operators(mesh, cfg.eps, cfg.tau);
  const UzawaConfig ucfg = cfg.uzawa();
  write_manifest(dir / "manifest.txt", "evolve", cfg,
                 {{"n_nodes", std::to_string(mesh.n_nodes())},
                  {"h", fmt("%.17g", mesh.h())},
                  {"eta", fmt("%.17g", ops.eta)},
                  {"obstacle_tol", fmt("%.17g", ucfg.obstacle.tol)},
                  {"obstacle_max_cycles", std::to_string(ucfg.obstacle.max_cycles)},
                  {"inner_max_iters", std::to_string(ucfg.inner.max_iters)},
                  {"rho_max", fmt("%.17g", ucfg.rho_max)},
                  {"random_low", fmt("%.17g", Scenario{}.low)},
                  {"random_high", fmt("%.17g", Scenario{}.high)}});

  const auto csv_path = dir / "iterations.csv";
  auto csv = open_out(csv_path);
  csv << kIterationsHeader << '\n';

  const Vector u0 = init_scenario(mesh, cfg.scenario_spec());
  write_snapshot(dir, "0", mesh, u0);

  EvolveSummary summary;
  const double mass0 = dot(ops.m, u0);
  const double mass_scale = std::abs(mass0) > 0.0 ? std::abs(mass0) : 1.0;
  auto on_step = [&](const StepReport& row, const Vector& u) {
    csv << iterations_row(row) << '\n';
    csv.flush();
    if (snapshot_due(row.tstep, cfg.n_steps, cfg.snapshot_every))
      write_snapshot(dir, std::to_string(row.tstep), mesh, u);
    const double drift = std::abs(row.mass - mass0) / mass_scale;
    summary.max_mass_drift = std::max(summary.max_mass_drift, drift);
    summary.converged = summary.converged && row.converged;
    log << "step " << row.tstep << ": ntrunc " << row.ntrunc << " (" << fmt("%.2f", row.pct_trunc)
        << "%), it1 " << row.it1 << ", it2 " << row.it2 << ", " << fmt("%.2f", row.time_s)
        << " s, mass drift " << fmt("%.2e", drift) << (row.converged ? "" : ", NOT CONVERGED") << '\n';
  };
  summary.report = run_evolution(mesh, cfg.scenario_spec(), ops, ucfg, cfg.n_steps, on_step);
  close_checked(csv, csv_path);
  return summary;
}

std::vector<SpectraRow> run_spectra(const SolverConfig& cfg, std::ostream& log) {
  const std::size_t n_side = static_cast<std::size_t>(cfg.spectra_mesh) + 1;
  if (n_side * n_side > kSpectraNodeLimit)
    throw InvalidArgument("spectra_mesh " + std::to_string(cfg.spectra_mesh) + " gives " +
                          std::to_string(n_side * n_side) + " nodes, above the limit of " +
                          std::to_string(kSpectraNodeLimit));
  const std::filesystem::path dir = cfg.out_dir;
  prepare_out_dir(dir);

  const Mesh mesh = build_uniform_mesh(n_side);
  const FemOperators ops = make_operators(mesh, cfg.eps, cfg.tau);
  const std::string mesh_name = "1/" + std::to_string(cfg.spectra_mesh);
  write_manifest(dir / "manifest.txt", "spectra", cfg,
                 {{"n_nodes", std::to_string(mesh.n_nodes())},
                  {"eta", fmt("%.17g", ops.eta)},
                  {"bound_slack", fmt("%.17g", kBoundSlack)}});

  std::vector<SpectraRow> rows;
  auto push = [&](std::string precond, std::string seed, SpectralReport rep, bool degenerate = false) {
    log << precond << " mask " << seed << ": kappa " << fmt("%.6f", rep.kappa)
        << (degenerate ? " (degenerate)" : rep.pass() ? " pass" : " FAIL") << '\n';
    for (const auto& v : rep.verdicts)
      if (!v.pass) log << "  violated: " << v.name << " (margin " << fmt("%.3e", v.margin) << ")\n";
    rows.push_back({std::move(precond), mesh_name, std::move(seed), std::move(rep), degenerate});
  };

  const SpectralReport bd = check_bd_bounds(ops);
  push("bd", "none", bd);
  push("schur", "none", check_schur_bounds(ops));
  push("bdsc", "none", check_bdsc_bounds(ops));
  push("btdsc", "none", check_btdsc_bounds(ops));

  for (int k = 0; k < cfg.n_masks; ++k) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
    const TruncationMask mask = random_mask(ops.size(), cfg.mask_fraction, seed);
    push("bd", std::to_string(seed), check_bd_bounds(ops, &mask));
    push("bdsc", std::to_string(seed), check_bdsc_bounds(ops, &mask));
  }

  // Every node truncated: the u-block of the truncated preconditioner
  // vanishes, so the row is reported but not certified.
  const TruncationMask all = TruncationMask::from_active(std::vector<bool>(ops.size(), true));
  push("bd", "all", check_bd_bounds(ops, &all), true);

  const auto path = dir / "spectra.csv";
  auto out = open_out(path);
  out << kSpectraHeader << '\n';
  for (const auto& r : rows) out << spectra_row(r) << '\n';
  close_checked(out, path);
  return rows;
}

ObstacleSummary run_obstacle(const SolverConfig& cfg, std::ostream& log) {
  const std::filesystem::path dir = cfg.out_dir;
  prepare_out_dir(dir);
  const Mesh mesh = build_uniform_mesh(cfg.n_side());
  const FemOperators ops = make_operators(mesh, cfg.eps, cfg.tau);
  const UzawaConfig ucfg = cfg.uzawa();
  write_manifest(dir / "manifest.txt", "obstacle", cfg,
                 {{"n_nodes", std::to_string(mesh.n_nodes())},
                  {"obstacle_tol", fmt("%.17g", ucfg.obstacle.tol)},
                  {"obstacle_max_cycles", std::to_string(ucfg.obstacle.max_cycles)}});

  const Vector u0 = init_scenario(mesh, cfg.scenario_spec());
  const UzawaSolver solver(ops, ucfg);
  UzawaState state;
  state.w.assign(ops.size(), 0.0);
  solver.begin_step(state, u0);
  Vector x0 = u0;
  ObstacleBounds::box(ops.size(), -1.0, 1.0).project(x0);

  ObstacleSummary s;
  s.result = solver.solve_u(state, state.w, x0);
  s.active = mask_from_iterate(s.result.x).active_count;
  write_snapshot(dir, "obstacle", mesh, s.result.x);
  log << "obstacle solve: " << s.result.cycles << " cycles, residual " << fmt("%.3e", s.result.residual)
      << ", " << s.active << " of " << ops.size() << " nodes at the bounds"
      << (s.result.converged ? "" : ", NOT CONVERGED") << '\n';
  return s;
}

}  // namespace chs
