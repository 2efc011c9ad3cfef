#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chs/config.hpp"
#include "chs/mesh.hpp"
#include "chs/spectra.hpp"
#include "chs/uzawa.hpp"

namespace chs {

// round(255 (u + 1) / 2), clamped to [0, 255].
unsigned char gray_level(double u);

// Binary PGM (P5) of a nodal field, top row (y = 1) first.
void write_pgm(const std::filesystem::path& path, const Mesh& mesh, std::span<const double> u);
// Same layout as the PGM, one mesh row per line, full precision.
void write_field_csv(const std::filesystem::path& path, const Mesh& mesh, std::span<const double> u);

inline constexpr const char* kIterationsHeader = "tstep,ntrunc,pct_trunc,it1,it2,time_s";
inline constexpr const char* kSpectraHeader =
    "precond,mesh,mask_seed,lambda_min,lambda_max,kappa,bound_lo,bound_hi,pass";

std::string iterations_row(const StepReport& row);

struct SpectraRow {
  std::string precond;
  std::string mesh;       // "1/8"
  std::string mask_seed;  // "none", "all" or the seed
  SpectralReport report;
  bool degenerate = false;
};
std::string spectra_row(const SpectraRow& row);

// Creates the directory and checks that it accepts files. Throws IoError.
void prepare_out_dir(const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const SolverConfig& cfg, const std::vector<std::pair<std::string, std::string>>& extra);

struct EvolveSummary {
  EvolutionReport report;
  bool converged = true;
  double max_mass_drift = 0.0;  // relative to |1^T M u^0| (absolute if that is 0)
};

// iterations.csv, u_<k>.pgm / u_<k>.csv at the snapshot cadence, manifest.txt.
EvolveSummary run_evolve(const SolverConfig& cfg, std::ostream& log);

// spectra.csv and manifest.txt; returns the rows written.
std::vector<SpectraRow> run_spectra(const SolverConfig& cfg, std::ostream& log);

struct ObstacleSummary {
  ObstacleResult result;
  std::size_t active = 0;
};

// One u-solve from the initial scenario with w = 0: writes u_obstacle.csv,
// u_obstacle.pgm and manifest.txt.
ObstacleSummary run_obstacle(const SolverConfig& cfg, std::ostream& log);

}  // namespace chs
