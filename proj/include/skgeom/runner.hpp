#pragma once

#include "skgeom/csv.hpp"
#include "skgeom/optimize.hpp"
#include "skgeom/sim.hpp"

#include <iosfwd>
#include <optional>

namespace skgeom {

/// Declarative experiment description; every field except the mapping name
/// has a default.
struct ExperimentConfig {
    std::string mapping;
    bool optimize_params = true; // explicit params switch this off
    MappingParams params;
    Real snr_start = 10, snr_stop = 45, snr_step = 5;
    std::int64_t n_samples = 100000;
    std::uint64_t seed = 1;
    Real sigma_x = 1;
    Real p_max = 1;
    int grid_size = 96;
    std::string out = "sweep.csv";
};

std::vector<Real> snr_grid(const ExperimentConfig& cfg);

/// Geometry report: classification, curvature levels, canal margin, and a
/// max-|kappa1|(delta, alpha1) grid CSV.
int cmd_analyze(const std::string& mapping, const MappingParams& params, int grid,
                Real noise_radius, std::ostream& report,
                const std::optional<std::string>& grid_csv_path);

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);

int cmd_baselines(int M, int N, const std::vector<Real>& snr_db,
                  const std::string& out_path, std::ostream& log);

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);

int cmd_optimize(const ExperimentConfig& cfg, std::ostream& log);

/// One full sweep point (optimize + simulate + references).
SweepRow sweep_point(const ExperimentConfig& cfg, Real snr_db,
                     const MappingParams* warm, MappingParams* out_params);

std::string describe(const SimResult& r);

} // namespace skgeom
