#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace skgeom {

using Real = double;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using Mat2 = Eigen::Matrix2d;

inline constexpr Real kPi = 3.14159265358979323846;
inline constexpr Real kInf = std::numeric_limits<Real>::infinity();

/// Rectangle in the (u1,u2) parameter plane.
struct Rect {
    Real u1_lo = 0, u1_hi = 1;
    Real u2_lo = 0, u2_hi = 1;

    bool contains(const Vec2& u, Real slack = 0) const {
        return u[0] >= u1_lo - slack && u[0] <= u1_hi + slack &&
               u[1] >= u2_lo - slack && u[1] <= u2_hi + slack;
    }
    Vec2 clamp(const Vec2& u) const {
        return {std::clamp(u[0], u1_lo, u1_hi), std::clamp(u[1], u2_lo, u2_hi)};
    }
};

inline Real db_from_ratio(Real r) { return 10.0 * std::log10(r); }
inline Real ratio_from_db(Real db) { return std::pow(10.0, db / 10.0); }

inline bool all_finite(const VecX& v) { return v.allFinite(); }

} // namespace skgeom
