#pragma once

#include "skgeom/common.hpp"
#include "skgeom/curve.hpp"

namespace skgeom {

/// Two-parameter surface patch in R^N. Partials not supplied at
/// construction fall back to central finite differences on eval.
struct ParametricSurface {
    int dim = 3;
    Rect domain;
    std::function<VecX(Vec2)> eval;
    std::function<VecX(Vec2)> S1, S2;        // first partials
    std::function<VecX(Vec2)> S11, S12, S22; // second partials
    bool analytic_first = false, analytic_second = false;
};

ParametricSurface make_surface(int dim, Rect domain, std::function<VecX(Vec2)> eval,
                               std::function<VecX(Vec2)> S1 = nullptr,
                               std::function<VecX(Vec2)> S2 = nullptr,
                               std::function<VecX(Vec2)> S11 = nullptr,
                               std::function<VecX(Vec2)> S12 = nullptr,
                               std::function<VecX(Vec2)> S22 = nullptr);

/// First and second fundamental form coefficients at a point.
struct FundamentalForms {
    Real g11 = 0, g12 = 0, g22 = 0;
    Real b11 = 0, b12 = 0, b22 = 0;
    bool has_sff = false;

    Real g() const { return g11 * g22 - g12 * g12; }
    Real b() const { return b11 * b22 - b12 * b12; }
    // contravariant metric: g^11 = g22/g, g^12 = -g12/g, g^22 = g11/g
    Real ginv11() const { return g22 / g(); }
    Real ginv12() const { return -g12 / g(); }
    Real ginv22() const { return g11 / g(); }
};

struct CurvatureReport {
    Real kappa1 = 0, kappa2 = 0; // |kappa1| >= |kappa2|
    Real K = 0, H = 0;
    Vec2 dir1 = Vec2::Zero(), dir2 = Vec2::Zero(); // parameter-plane directions
    bool is_umbilic = false;
};

/// Christoffel symbols of the 2nd kind; sym[c][a][b] = Gamma^c_{ab}.
struct ChristoffelSymbols {
    Real sym[2][2][2] = {};
    Real operator()(int c, int a, int b) const { return sym[c][a][b]; }
};

struct ClassificationReport {
    bool developable = false, minimal = false;
    bool coords_are_loc = false, coords_are_geodesic = false;
    Real max_violation_developable = 0;
    Real max_violation_minimal = 0;
    Real max_violation_loc = 0;
    Real max_violation_geodesic = 0;
};

FundamentalForms metric_tensor(const ParametricSurface& s, const Vec2& u);
FundamentalForms second_fundamental_form(const ParametricSurface& s, const Vec2& u);
FundamentalForms fundamental_forms(const ParametricSurface& s, const Vec2& u);

/// Unit normal S1 x S2 / |S1 x S2| (positive orientation).
Vec3 unit_normal(const ParametricSurface& s, const Vec2& u);

CurvatureReport principal_curvatures(const FundamentalForms& f);

Real normal_curvature(const FundamentalForms& f, const Vec2& direction);

ChristoffelSymbols christoffel_symbols(const ParametricSurface& s, const Vec2& u);

/// Same, from a metric-only callback (no embedding involved).
ChristoffelSymbols christoffel_from_metric(
    const std::function<void(const Vec2&, Real&, Real&, Real&)>& metric, const Vec2& u);

ClassificationReport classify_surface(const ParametricSurface& s, int grid = 16);

/// True iff |y' z z'| vanishes along the common parameter interval
/// (the ruled surface y(l) + t z(l) is developable).
bool ruled_developable_test(const ParametricCurve& indicatrix,
                            const ParametricCurve& generator, int samples = 64);

Real weingarten_residual(const ParametricSurface& s, const Vec2& u);
Real gauss_formula_residual(const ParametricSurface& s, const Vec2& u);

/// Covariant 2nd-order tensor transform of the metric part,
/// jac(i,j) = du^i / dubar^j.
FundamentalForms covariant_metric_transform(const FundamentalForms& f, const Mat2& jac);

} // namespace skgeom
