#pragma once

#include "skgeom/distortion.hpp"

#include <vector>

namespace skgeom {

/// Per-SNR constrained minimization of eps_a^2 + eps_ch^2 over the mapping
/// parameters under the channel power budget P(params) <= p_max.
struct OptProblem {
    MappingKind family = MappingKind::Rcasd;
    MappingParams base; // sigma_x, p_max, eta and fixed extras
    Real delta_lo = 0.01, delta_hi = 3.0;
    Real alpha_lo = 0.01, alpha_hi = 50.0;
    int multistarts = 16;
};

struct OptResult {
    MappingParams params;
    Real d_total = kInf;
    Real lambda = 0;       // multiplier of the power constraint
    Real kkt_residual = kInf;
    bool active_constraint = false;
    bool feasible = false;
};

/// Simplex minimizer (no derivatives). Returns best point found.
std::vector<Real> nelder_mead(const std::function<Real(const std::vector<Real>&)>& f,
                              std::vector<Real> x0, Real scale = 0.05,
                              Real fatol = 1e-14, Real xatol = 1e-12,
                              int max_evals = 20000);

OptResult optimize(const OptProblem& problem, Real snr_db,
                   const MappingParams* warm_start = nullptr);

struct SweepPoint {
    Real snr_db = 0;
    OptResult opt;
    Real sdr_analytical_db = 0;
    bool ok = false;
    std::string error;
};

/// Warm-started optimization over a monotone SNR grid.
std::vector<SweepPoint> sweep(const OptProblem& problem, const std::vector<Real>& snr_grid_db);

/// Objective and constraint as plain functions of the parameters.
Real total_distortion_model(MappingKind family, const MappingParams& p, Real snr);
Real channel_power_model(MappingKind family, const MappingParams& p);

} // namespace skgeom
