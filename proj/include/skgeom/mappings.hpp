#pragma once

#include "skgeom/surface.hpp"

#include <nlohmann/json_fwd.hpp>

#include <vector>

namespace skgeom {

enum class MappingKind {
    Helicoid,
    HelicoidArcLength,
    Rcasd,
    Mscds,
    Snasu,
    Bpam,
};

std::string to_string(MappingKind kind);
MappingKind mapping_kind_from_string(const std::string& name);

/// Free parameters of a mapping family. delta is the fold spacing,
/// alpha1/alpha2 the channel amplification factors.
struct MappingParams {
    Real delta = 1.0;
    Real alpha1 = 1.0;
    Real alpha2 = 1.0;
    Real eta = 0.16; // spiral arc-length constant
    Real sigma_x = 1.0;
    Real p_max = 1.0;

    // helicoid
    Real R = kPi;
    bool y2_power_correction = true;

    // MS-CDS
    Real a = 0.0;
    Real alpha0 = 0.0;
    Real B = 1.0;
    int theta0_sign = 1; // theta0 = sign * pi/2

    // snail surface
    Real phase = kPi / 2; // 0 or pi/2
};

/// A dimension-changing analog mapping realized by a surface in the
/// source space, with channel coordinates z = (z1, z2).
struct MappingSystem {
    std::string name;
    MappingKind kind = MappingKind::Bpam;
    int source_dim = 3;
    int channel_dim = 2;
    MappingParams params;
    Rect z_domain;

    std::function<Vec3(const Vec2&)> embed;
    std::function<Vec3(const Vec2&)> d1, d2;       // partials wrt z1, z2
    std::function<Vec3(const Vec2&)> d11, d12, d22;

    /// Closed-form fundamental forms of the family (model, not numerics).
    std::function<FundamentalForms(const Vec2&)> model_forms;

    /// Candidate channel points near the projection of x (fold candidates).
    std::function<void(const Vec3&, std::vector<Vec2>&)> projection_seeds;

    /// Generic surface view for the geometry operations.
    ParametricSurface surface() const;
};

MappingSystem helicoid_surface(const MappingParams& p);
MappingSystem helicoid_arclength_variant(const MappingParams& p);
MappingSystem rcasd_surface(const MappingParams& p);
MappingSystem mscds_surface(const MappingParams& p);
MappingSystem snasu_surface(const MappingParams& p);
MappingSystem bpam_linear(const MappingParams& p, int M = 3, int N = 2);

MappingSystem make_mapping(MappingKind kind, const MappingParams& p);
MappingSystem make_mapping(const std::string& name, const MappingParams& p);

void to_json(nlohmann::json& j, const MappingParams& p);
void from_json(const nlohmann::json& j, MappingParams& p);

} // namespace skgeom
