#pragma once

#include "skgeom/distortion.hpp"
#include "skgeom/mappings.hpp"

#include <cstdint>
#include <vector>

namespace skgeom {

struct ProjectionOpts {
    int grid_size = 96;    // coarse grid per axis
    int refine_iters = 20; // Gauss-Newton cap per basin
    int basins = 3;
};

struct SimConfig {
    MappingSystem mapping;
    Real snr_db = 30;
    Real sigma_x = 1;
    std::int64_t n_samples = 100000;
    std::uint64_t seed = 1;
    ProjectionOpts projection;
    Real p_max = 1; // per channel dimension; sigma_n^2 = p_max / snr
};

struct SimResult {
    Real sdr_db = 0;
    Real emp_power[2] = {0, 0};
    Real anomaly_rate = 0;
    Real nonconverged_rate = 0;
    DistortionBreakdown breakdown;
    bool power_warn = false;
    std::int64_t n = 0;
};

/// Precomputed surface samples on the coarse search grid.
struct EncodeGrid {
    int n = 0;
    Rect domain;
    std::vector<Vec3> points;
    std::vector<Vec2> zs;
};

EncodeGrid build_encode_grid(const MappingSystem& m, int grid_size);

struct EncodeResult {
    Vec2 z = Vec2::Zero();
    bool converged = false;
};

/// Nearest-point projection of x onto the mapping surface: coarse grid,
/// best basins plus analytic fold candidates, Gauss-Newton polish.
EncodeResult encode(const MappingSystem& m, const EncodeGrid& grid, const Vec3& x,
                    const ProjectionOpts& opts = {});

/// Receiver: pass the (clamped) channel point through the surface.
Vec3 decode(const MappingSystem& m, const Vec2& z_received, bool* clamped = nullptr);

SimResult run_simulation(const SimConfig& config);

/// Least-squares SDR-vs-SNR slope over the top half of the grid (dB per dB).
Real slope_estimate(const std::vector<std::pair<Real, Real>>& snr_sdr_db);

/// Worker cap from SKGEOM_THREADS, else hardware concurrency.
int worker_count();

} // namespace skgeom
