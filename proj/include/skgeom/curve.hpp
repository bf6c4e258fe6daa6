#pragma once

#include "skgeom/common.hpp"

#include <optional>

namespace skgeom {

/// A curve x -> R^N with derivative evaluators up to 3rd order.
/// Derivatives not supplied at construction fall back to central
/// finite differences on eval.
struct ParametricCurve {
    int dim = 3;
    Real x_lo = 0, x_hi = 1;
    std::function<VecX(Real)> eval;
    std::function<VecX(Real)> d1, d2, d3;
    bool analytic_d1 = false, analytic_d2 = false, analytic_d3 = false;
};

ParametricCurve make_curve(int dim, Real x_lo, Real x_hi,
                           std::function<VecX(Real)> eval,
                           std::function<VecX(Real)> d1 = nullptr,
                           std::function<VecX(Real)> d2 = nullptr,
                           std::function<VecX(Real)> d3 = nullptr);

/// Moving trihedron plus curvature/torsion at a point (N=3 for p, b, tau).
struct FrenetFrame {
    Vec3 t = Vec3::Zero(), p = Vec3::Zero(), b = Vec3::Zero();
    Real kappa = 0;
    Real tau = 0;
    bool degenerate = false; // kappa below threshold; p, b, tau unset
};

/// Tube of radius r around a spine curve.
struct CanalSurfaceSpec {
    ParametricCurve spine;
    Real tube_radius = 0;
};

struct CanalTestResult {
    bool safe = false;
    Real worst_margin = 0; // min rho_s - r over the sampling
    Real min_fold_distance = kInf;
};

struct OsculatingSphere {
    Vec3 center = Vec3::Zero();
    Real radius = 0;
    bool circle_fallback = false; // tau ~ 0, sphere degenerates to the circle
};

Real arc_length(const ParametricCurve& curve, Real x0, Real x1);

/// Returns the same image reparametrized so that ||y'(l)|| == 1.
/// Domain of the result is [0, total_length].
ParametricCurve reparametrize_by_arc_length(const ParametricCurve& curve);

FrenetFrame frenet(const ParametricCurve& curve, Real x);

/// Curvature alone, valid in any dimension >= 2.
Real curvature(const ParametricCurve& curve, Real x);

/// Local canonical shape [l, k0 l^2/2, k0 t0 l^3/6].
Vec3 canonical_form(Real kappa0, Real tau0, Real ell);

OsculatingSphere osculating_sphere(const ParametricCurve& curve, Real x);

CanalTestResult canal_self_intersection_test(const CanalSurfaceSpec& spec, int samples);

/// Noise-ball radius sqrt((N-1)/N * b_n * sigma_n^2).
Real noise_tube_radius(Real sigma_n, int N, Real b_n);

namespace fd {
VecX d1(const std::function<VecX(Real)>& f, Real x);
VecX d2(const std::function<VecX(Real)>& f, Real x);
VecX d3(const std::function<VecX(Real)>& f, Real x);
} // namespace fd

} // namespace skgeom
