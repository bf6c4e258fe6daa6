#pragma once

#include "skgeom/mappings.hpp"
#include "skgeom/rng.hpp"

namespace skgeom {

struct DistortionBreakdown {
    Real eps_approx = 0;  // source-variance units, per component
    Real eps_ch_weak = 0; // 1st-order channel term
    Real eps_ch_2nd = 0;  // curvature correction
    Real total() const { return eps_approx + eps_ch_weak + eps_ch_2nd; }
};

enum class PdfFamily { DoubleRayleigh, Gaussian, Laplace, DoubleGamma, Sine };

struct ChannelStats {
    Real variance = 0;
    PdfFamily family = PdfFamily::Gaussian;
    std::function<Real(Real)> pdf;
    std::function<Real(SampleRng&)> sample;
};

struct ChannelModel {
    ChannelStats ch[2];
    Real total_power = 0; // (var1 + var2) / 2, per channel dimension
};

ChannelModel channel_model(const MappingSystem& m);

/// (1 + snr)^(N/M)
Real opta_sdr(Real snr, int M, int N);

/// Optimal linear mapping with MMSE scaling; equals OPTA when M == N.
Real bpam_sdr(Real snr, int M, int N);

/// g11 sn^2 + (3/4) k^2 sn^4 + (5/12) k^2 t^2 sn^6   (reduction, scaled arc length)
Real m1_channel_distortion_3rd(Real g11, Real kappa, Real tau, Real sigma_n);

/// (sn^2/g11)(1 + sn^2 k^2/4 [+ 5 sn^4 k^4/48])      (expansion)
Real one_n_weak_noise_2nd(Real g11, Real kappa, Real sigma_n, bool third_term = false);

enum class MapMode { Expansion, Reduction };

/// Pointwise weak-noise distortion over orthogonal coordinate directions.
Real mn_pointwise_distortion(const std::vector<std::pair<Real, Real>>& direction_metrics,
                             Real sigma_n, int M, MapMode mode);

/// Numeric E{trace G} sn^2 / M under the channel pdfs (tensorized quadrature).
Real weak_channel_distortion_integral(const MappingSystem& m, Real sigma_n);

/// Family closed form of the same quantity.
Real weak_channel_distortion_closed(const MappingSystem& m, Real sigma_n,
                                    bool snasu_paper_series = false);

/// Uniform-mapping bound (M-N) delta^2 / (4 M (M-N+2)).
Real uniform_approx_bound(Real delta, int M = 3, int N = 2);

/// Cubic fit for the helicoid, valid delta in [0,3] at sigma_x = 1.
Real helicoid_approx_fit(Real delta);

Real approximation_distortion(const MappingSystem& m);

/// Dominating high-SNR distortion exponent of a split (m:1 + n:1 style) system.
Real splitting_slope(int m, int n, MapMode mode);

// Spiral-cylinder high-SNR parameter laws.
Real rcasd_kappa_const(Real sigma_x = 1, Real eta = 0.16);
Real rcasd_high_snr_delta(Real snr, Real sigma_x = 1, Real eta = 0.16);
Real rcasd_delta_exact(Real snr, Real sigma_x = 1, Real eta = 0.16);
Real rcasd_boundary_alpha1_sq(Real delta, Real alpha2, Real p_max = 1, Real sigma_x = 1,
                              Real eta = 0.16);
Real rcasd_kkt_alpha2(Real delta, Real p_max = 1, Real sigma_x = 1, Real eta = 0.16);

Real snasu_z1_pdf(const MappingParams& p, Real z);
Real snasu_z2_pdf(const MappingParams& p, Real z);

/// Mean of kappa1^2 + kappa2^2 under the channel pdfs (for the 2nd-order term).
Real mean_sq_curvature(const MappingSystem& m);

/// Analytical performance model at a given channel SNR (power-ratio form).
DistortionBreakdown analytic_breakdown(const MappingSystem& m, Real snr,
                                       bool with_second_order = false);

Real analytic_sdr_db(const MappingSystem& m, Real snr_db);

} // namespace skgeom
