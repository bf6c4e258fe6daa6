#include "skgeom/mappings.hpp"

#include <nlohmann/json.hpp>

namespace skgeom {

std::string to_string(MappingKind kind) {
    switch (kind) {
        case MappingKind::Helicoid: return "helicoid";
        case MappingKind::HelicoidArcLength: return "helicoid-arclength";
        case MappingKind::Rcasd: return "rcasd";
        case MappingKind::Mscds: return "mscds";
        case MappingKind::Snasu: return "snasu";
        case MappingKind::Bpam: return "bpam";
    }
    return "?";
}

MappingKind mapping_kind_from_string(const std::string& name) {
    if (name == "helicoid") return MappingKind::Helicoid;
    if (name == "helicoid-arclength") return MappingKind::HelicoidArcLength;
    if (name == "rcasd") return MappingKind::Rcasd;
    if (name == "mscds") return MappingKind::Mscds;
    if (name == "snasu") return MappingKind::Snasu;
    if (name == "bpam") return MappingKind::Bpam;
    throw std::invalid_argument("unknown mapping name: " + name);
}

namespace {

void require_positive(const MappingParams& p) {
    if (p.delta <= 0 || p.alpha1 <= 0 || p.alpha2 <= 0 || p.eta <= 0 ||
        p.sigma_x <= 0)
        throw std::invalid_argument("mapping parameters must be positive");
}

// sqrt reparametrization u(z1) = sqrt(alpha1 |z1| / (eta delta)); the
// derivative factor q = alpha1/(2 eta delta u) diverges at the origin, so
// clamp u away from it for derivative evaluation.
struct SqrtParam {
    Real alpha1, etad;
    Real u(Real z1) const { return std::sqrt(alpha1 * std::abs(z1) / etad); }
    Real q(Real u_) const { return alpha1 / (2.0 * etad * std::max(u_, 1e-9)); }
};

Real upper_tail_gauss(Real mass) {
    // two-sided: |z| > t with probability `mass`
    // Newton on erfc(t/sqrt(2)) = mass
    Real t = 4.0;
    for (int i = 0; i < 60; ++i) {
        Real f = std::erfc(t / std::sqrt(2.0)) - mass;
        Real df = -std::sqrt(2.0 / kPi) * std::exp(-0.5 * t * t);
        t -= f / df;
    }
    return t;
}

Real chi2_3_upper(Real mass) {
    auto surv = [](Real x) {
        return std::erfc(std::sqrt(x / 2.0)) +
               std::sqrt(2.0 * x / kPi) * std::exp(-0.5 * x);
    };
    Real lo = 1.0, hi = 100.0;
    for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
        Real mid = 0.5 * (lo + hi);
        (surv(mid) > mass ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

ParametricSurface MappingSystem::surface() const {
    auto wrap = [](const std::function<Vec3(const Vec2&)>& f) {
        return std::function<VecX(Vec2)>([f](Vec2 u) { return VecX(f(u)); });
    };
    return make_surface(3, z_domain, wrap(embed), wrap(d1), wrap(d2), wrap(d11),
                        wrap(d12), wrap(d22));
}

// ---------------------------------------------------------------------------
// Helicoid (Archimedes' screw):
//   S = ((R a1/pi) z1 cos(a2 z2), (R a1/pi) z1 sin(a2 z2), (delta a2/pi) z2)
// ---------------------------------------------------------------------------
MappingSystem helicoid_surface(const MappingParams& p) {
    require_positive(p);
    if (p.R <= 0) throw std::invalid_argument("helicoid: R must be positive");
    MappingSystem m;
    m.kind = MappingKind::Helicoid;
    m.name = "helicoid";
    m.params = p;

    const Real c = p.R * p.alpha1 / kPi;
    const Real hh = p.delta * p.alpha2 / kPi;
    const Real a2 = p.alpha2;

    m.embed = [=](const Vec2& z) -> Vec3 {
        Real th = a2 * z[1];
        return {c * z[0] * std::cos(th), c * z[0] * std::sin(th), hh * z[1]};
    };
    m.d1 = [=](const Vec2& z) -> Vec3 {
        Real th = a2 * z[1];
        return {c * std::cos(th), c * std::sin(th), 0};
    };
    m.d2 = [=](const Vec2& z) -> Vec3 {
        Real th = a2 * z[1];
        return {-c * z[0] * a2 * std::sin(th), c * z[0] * a2 * std::cos(th), hh};
    };
    m.d11 = [](const Vec2&) -> Vec3 { return Vec3::Zero(); };
    m.d12 = [=](const Vec2& z) -> Vec3 {
        Real th = a2 * z[1];
        return {-c * a2 * std::sin(th), c * a2 * std::cos(th), 0};
    };
    m.d22 = [=](const Vec2& z) -> Vec3 {
        Real th = a2 * z[1];
        return {-c * z[0] * a2 * a2 * std::cos(th), -c * z[0] * a2 * a2 * std::sin(th), 0};
    };

    m.model_forms = [=](const Vec2& z) {
        FundamentalForms f;
        f.g11 = c * c;
        f.g12 = 0;
        f.g22 = c * c * a2 * a2 * z[0] * z[0] + hh * hh;
        f.b11 = 0;
        f.b22 = 0;
        f.b12 = -c * c * a2 * hh / std::sqrt(f.g());
        f.has_sff = true;
        return f;
    };

    // double-Rayleigh z1, near-Gaussian z2
    Real ups = (kPi * p.sigma_x / p.R) / p.alpha1;
    Real z1max = ups * std::sqrt(2.0 * std::log(1e6));
    Real var_y2 = std::pow(kPi * p.sigma_x / p.delta, 2) +
                  (p.y2_power_correction ? 0.5 : 0.0);
    Real z2max = upper_tail_gauss(1e-6) * std::sqrt(var_y2) / p.alpha2;
    m.z_domain = {-z1max, z1max, -z2max, z2max};

    m.projection_seeds = [=](const Vec3& x, std::vector<Vec2>& out) {
        Real th = std::atan2(x[1], x[0]);
        Real z2_target = x[2] / hh;
        for (Real off : {0.0, kPi}) {
            Real k0 = std::round((a2 * z2_target - (th + off)) / (2 * kPi));
            for (int dk = -1; dk <= 1; ++dk) {
                Real z2 = (th + off + 2 * kPi * (k0 + dk)) / a2;
                Real z1 = (x[0] * std::cos(a2 * z2) + x[1] * std::sin(a2 * z2)) / c;
                out.push_back({z1, z2});
            }
        }
    };
    return m;
}

// ---------------------------------------------------------------------------
// Helicoid with the angle coordinate rescaled by w(z1) = sqrt(delta^2+R^2 z1^2)
// so that g22 == 1. Demonstrates how the metric load moves to g11.
// ---------------------------------------------------------------------------
MappingSystem helicoid_arclength_variant(const MappingParams& p) {
    require_positive(p);
    MappingSystem m;
    m.kind = MappingKind::HelicoidArcLength;
    m.name = "helicoid-arclength";
    m.params = p;

    const Real R = p.R, d = p.delta;
    auto theta = [=](const Vec2& z) {
        return kPi * z[1] / std::sqrt(d * d + R * R * z[0] * z[0]);
    };
    m.embed = [=](const Vec2& z) -> Vec3 {
        Real th = theta(z);
        return {R / kPi * z[0] * std::cos(th), R / kPi * z[0] * std::sin(th),
                d / kPi * th};
    };
    m.d1 = [=](const Vec2& z) -> Vec3 {
        Real w2 = d * d + R * R * z[0] * z[0];
        Real th = theta(z);
        Real th1 = -kPi * z[1] * R * R * z[0] / std::pow(w2, 1.5);
        return {R / kPi * (std::cos(th) - z[0] * std::sin(th) * th1),
                R / kPi * (std::sin(th) + z[0] * std::cos(th) * th1), d / kPi * th1};
    };
    m.d2 = [=](const Vec2& z) -> Vec3 {
        Real w = std::sqrt(d * d + R * R * z[0] * z[0]);
        Real th = theta(z);
        Real th2 = kPi / w;
        return {-R / kPi * z[0] * std::sin(th) * th2,
                R / kPi * z[0] * std::cos(th) * th2, d / kPi * th2};
    };
    auto base = m.embed;
    m.d11 = [base](const Vec2& z) -> Vec3 {
        Real h = 1e-4 * (1 + std::abs(z[0]));
        return (base({z[0] + h, z[1]}) - 2 * base(z) + base({z[0] - h, z[1]})) / (h * h);
    };
    m.d22 = [base](const Vec2& z) -> Vec3 {
        Real h = 1e-4 * (1 + std::abs(z[1]));
        return (base({z[0], z[1] + h}) - 2 * base(z) + base({z[0], z[1] - h})) / (h * h);
    };
    m.d12 = [base](const Vec2& z) -> Vec3 {
        Real h = 1e-4 * (1 + z.cwiseAbs().maxCoeff());
        return (base({z[0] + h, z[1] + h}) - base({z[0] + h, z[1] - h}) -
                base({z[0] - h, z[1] + h}) + base({z[0] - h, z[1] - h})) /
               (4 * h * h);
    };

    m.model_forms = [=](const Vec2& z) {
        FundamentalForms f;
        Real w2 = d * d + R * R * z[0] * z[0];
        f.g11 = (w2 * w2 + std::pow(R, 4) * z[0] * z[0] * z[1] * z[1]) /
                (w2 * w2 * kPi * kPi) * R * R;
        f.g22 = 1.0;
        f.g12 = 0.0; // not exactly zero off-axis; model applies near z2 = 0
        return f;
    };

    Real ups = kPi * p.sigma_x / p.R;
    m.z_domain = {-5 * ups, 5 * ups, -5 * (kPi * p.sigma_x / d + 1), 5 * (kPi * p.sigma_x / d + 1)};
    return m;
}

// ---------------------------------------------------------------------------
// Right cylinder with (double) Archimedes-spiral directrix:
//   S = (sgn(z1) a u cos u, sgn(z1) a u sin u, alpha2 z2), a = delta/pi,
//   u = sqrt(alpha1 |z1| / (eta delta))  (arc-length spiral traversal)
// ---------------------------------------------------------------------------
MappingSystem rcasd_surface(const MappingParams& p) {
    require_positive(p);
    MappingSystem m;
    m.kind = MappingKind::Rcasd;
    m.name = "rcasd";
    m.params = p;

    const Real a = p.delta / kPi;
    const Real a2 = p.alpha2;
    const SqrtParam sp{p.alpha1, p.eta * p.delta};

    m.embed = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]);
        Real s = z[0] < 0 ? -1.0 : 1.0;
        return {s * a * u * std::cos(u), s * a * u * std::sin(u), a2 * z[1]};
    };
    m.d1 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]), q = sp.q(u);
        return {a * q * (std::cos(u) - u * std::sin(u)),
                a * q * (std::sin(u) + u * std::cos(u)), 0};
    };
    m.d2 = [=](const Vec2&) -> Vec3 { return {0, 0, a2}; };
    m.d11 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]), q = sp.q(u);
        Real s = z[0] < 0 ? -1.0 : 1.0;
        Real cu = std::cos(u), su = std::sin(u);
        Vec3 fuu{s * a * (-2 * su - u * cu), s * a * (2 * cu - u * su), 0};
        Vec3 fu{s * a * (cu - u * su), s * a * (su + u * cu), 0};
        return q * q * fuu - (q * q / std::max(u, 1e-9)) * fu;
    };
    m.d12 = [](const Vec2&) -> Vec3 { return Vec3::Zero(); };
    m.d22 = [](const Vec2&) -> Vec3 { return Vec3::Zero(); };

    m.model_forms = [=](const Vec2& z) {
        Real u = sp.u(z[0]), q = sp.q(u);
        FundamentalForms f;
        f.g11 = a * a * q * q * (1 + u * u);
        f.g12 = 0;
        f.g22 = a2 * a2;
        f.b11 = -a * q * q * (2 + u * u) / std::sqrt(1 + u * u);
        f.b12 = 0;
        f.b22 = 0;
        f.has_sff = true;
        return f;
    };

    Real mu = 2.0 * p.eta * kPi * kPi * p.sigma_x * p.sigma_x / (p.delta * p.alpha1);
    Real z1max = mu * std::log(1e6);
    Real z2max = upper_tail_gauss(1e-6) * p.sigma_x / p.alpha2;
    m.z_domain = {-z1max, z1max, -z2max, z2max};

    m.projection_seeds = [=](const Vec3& x, std::vector<Vec2>& out) {
        Real r = std::hypot(x[0], x[1]);
        Real ur = kPi * r / p.delta;
        Real z2 = x[2] / a2;
        for (Real s : {1.0, -1.0}) {
            Real th = std::atan2(s * x[1], s * x[0]);
            if (th < 0) th += 2 * kPi;
            Real k0 = std::round((ur - th) / (2 * kPi));
            for (int dk = -1; dk <= 1; ++dk) {
                Real u = th + 2 * kPi * (k0 + dk);
                if (u < 0) continue;
                out.push_back({s * sp.etad * u * u / p.alpha1, z2});
            }
        }
    };
    return m;
}

// ---------------------------------------------------------------------------
// Monge surface with cylindrical directrix. The generating point
// (A, W) rotates with the angle u; W carries the z2 parabola.
//   A = delta/pi, W = A (alpha0 - u) - a (alpha2 z2)^2 sin(theta0)
// ---------------------------------------------------------------------------
MappingSystem mscds_surface(const MappingParams& p) {
    require_positive(p);
    if (p.theta0_sign != 1 && p.theta0_sign != -1)
        throw std::invalid_argument("mscds: theta0 must be +pi/2 or -pi/2");
    if (p.B <= 0 || p.a < 0)
        throw std::invalid_argument("mscds: need B > 0 and a >= 0");
    MappingSystem m;
    m.kind = MappingKind::Mscds;
    m.name = "mscds";
    m.params = p;

    const Real A = p.delta / kPi;
    const Real a2 = p.alpha2, B = p.B, ap = p.a, al0 = p.alpha0;
    const Real s0 = static_cast<Real>(p.theta0_sign);
    const SqrtParam sp{p.alpha1, p.eta * p.delta};

    auto Wf = [=](Real u, Real z2) {
        Real zeta = a2 * z2;
        return A * (al0 - u) - ap * zeta * zeta * s0;
    };

    m.embed = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]);
        Real s = z[0] < 0 ? -1.0 : 1.0;
        Real W = Wf(u, z[1]);
        return {s * (A * std::cos(u) - W * std::sin(u)),
                s * (A * std::sin(u) + W * std::cos(u)), B * a2 * z[1] * s0};
    };
    m.d1 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]), q = sp.q(u);
        Real W = Wf(u, z[1]);
        return {-W * q * std::cos(u), -W * q * std::sin(u), 0};
    };
    m.d2 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]);
        Real s = z[0] < 0 ? -1.0 : 1.0;
        Real Wz2 = -2 * ap * a2 * a2 * z[1] * s0;
        return {-s * Wz2 * std::sin(u), s * Wz2 * std::cos(u), B * a2 * s0};
    };
    m.d11 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]), q = sp.q(u);
        Real s = z[0] < 0 ? -1.0 : 1.0;
        Real W = Wf(u, z[1]);
        Real cu = std::cos(u), su = std::sin(u);
        Vec3 fuu{s * (A * cu + W * su), s * (A * su - W * cu), 0};
        Vec3 fu{-s * W * cu, -s * W * su, 0};
        return q * q * fuu - (q * q / std::max(u, 1e-9)) * fu;
    };
    m.d12 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]), q = sp.q(u);
        Real Wz2 = -2 * ap * a2 * a2 * z[1] * s0;
        return {-Wz2 * q * std::cos(u), -Wz2 * q * std::sin(u), 0};
    };
    m.d22 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]);
        Real s = z[0] < 0 ? -1.0 : 1.0;
        Real Wz2z2 = -2 * ap * a2 * a2 * s0;
        return {-s * Wz2z2 * std::sin(u), s * Wz2z2 * std::cos(u), 0};
    };

    m.model_forms = [=](const Vec2& z) {
        Real u = sp.u(z[0]), q = sp.q(u);
        Real W = Wf(u, z[1]);
        FundamentalForms f;
        f.g11 = q * q * W * W;
        f.g12 = 0;
        f.g22 = B * B * a2 * a2 + 4 * ap * ap * std::pow(a2, 4) * z[1] * z[1];
        return f;
    };

    Real mu = 2.0 * p.eta * kPi * kPi * p.sigma_x * p.sigma_x / (p.delta * p.alpha1);
    Real z1max = mu * std::log(1e6);
    Real z2max = upper_tail_gauss(1e-6) * p.sigma_x / (p.alpha2 * B);
    m.z_domain = {-z1max, z1max, -z2max, z2max};

    m.projection_seeds = [=](const Vec3& x, std::vector<Vec2>& out) {
        Real r = std::hypot(x[0], x[1]);
        Real ur = std::max(r / A + al0, 0.0);
        Real z2 = x[2] / (B * a2 * s0);
        for (Real s : {1.0, -1.0}) {
            Real th = std::atan2(s * x[1], s * x[0]);
            Real k0 = std::round((ur - th) / (2 * kPi));
            for (int dk = -1; dk <= 1; ++dk) {
                Real u = th + 2 * kPi * (k0 + dk);
                if (u < 0) continue;
                out.push_back({s * sp.etad * u * u / p.alpha1, z2});
            }
        }
    };
    return m;
}

// ---------------------------------------------------------------------------
// Double snail surface (spherically symmetric for a = b = c = 2 delta/pi):
//   z1 >= 0: a u (sin u cos th, cos u cos th, -sin th)
//   z1 <  0: a u (cos u cos th, -sin u cos th, +sin th)   [psi = pi/2]
// with th = alpha2 z2 + phase.
// ---------------------------------------------------------------------------
MappingSystem snasu_surface(const MappingParams& p) {
    require_positive(p);
    if (p.phase != 0 && p.phase != kPi / 2)
        throw std::invalid_argument("snasu: phase must be 0 or pi/2");
    MappingSystem m;
    m.kind = MappingKind::Snasu;
    m.name = "snasu";
    m.params = p;

    const Real a = 2.0 * p.delta / kPi;
    const Real a2 = p.alpha2, ph = p.phase;
    const SqrtParam sp{p.alpha1, p.eta * p.delta};

    m.embed = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]);
        Real th = a2 * z[1] + ph;
        Real ct = std::cos(th), st = std::sin(th);
        if (z[0] >= 0)
            return {a * u * std::sin(u) * ct, a * u * std::cos(u) * ct, -a * u * st};
        return {a * u * std::cos(u) * ct, -a * u * std::sin(u) * ct, a * u * st};
    };
    // F(u, th) and partials per branch; chain rule through u(z1)
    auto fu = [=](Real u, Real th, bool pos) -> Vec3 {
        Real ct = std::cos(th), st = std::sin(th);
        Real cu = std::cos(u), su = std::sin(u);
        if (pos) return {a * (su + u * cu) * ct, a * (cu - u * su) * ct, -a * st};
        return {a * (cu - u * su) * ct, -a * (su + u * cu) * ct, a * st};
    };
    auto fuu = [=](Real u, Real th, bool pos) -> Vec3 {
        Real ct = std::cos(th);
        Real cu = std::cos(u), su = std::sin(u);
        if (pos) return {a * (2 * cu - u * su) * ct, a * (-2 * su - u * cu) * ct, 0};
        return {a * (-2 * su - u * cu) * ct, -a * (2 * cu - u * su) * ct, 0};
    };
    auto fth = [=](Real u, Real th, bool pos) -> Vec3 {
        Real ct = std::cos(th), st = std::sin(th);
        Real cu = std::cos(u), su = std::sin(u);
        if (pos) return {-a * u * su * st, -a * u * cu * st, -a * u * ct};
        return {-a * u * cu * st, a * u * su * st, a * u * ct};
    };
    auto fthth = [=](Real u, Real th, bool pos) -> Vec3 {
        Real ct = std::cos(th), st = std::sin(th);
        Real cu = std::cos(u), su = std::sin(u);
        if (pos) return {-a * u * su * ct, -a * u * cu * ct, a * u * st};
        return {-a * u * cu * ct, a * u * su * ct, -a * u * st};
    };
    auto futh = [=](Real u, Real th, bool pos) -> Vec3 {
        Real st = std::sin(th), ct = std::cos(th);
        Real cu = std::cos(u), su = std::sin(u);
        if (pos) return {-a * (su + u * cu) * st, -a * (cu - u * su) * st, -a * ct};
        return {-a * (cu - u * su) * st, a * (su + u * cu) * st, a * ct};
    };

    m.d1 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]), q = sp.q(u);
        Real s = z[0] < 0 ? -1.0 : 1.0;
        return s * q * fu(u, a2 * z[1] + ph, z[0] >= 0);
    };
    m.d2 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]);
        return a2 * fth(u, a2 * z[1] + ph, z[0] >= 0);
    };
    m.d11 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]), q = sp.q(u);
        Real th = a2 * z[1] + ph;
        bool pos = z[0] >= 0;
        return q * q * fuu(u, th, pos) - (q * q / std::max(u, 1e-9)) * fu(u, th, pos);
    };
    m.d12 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]), q = sp.q(u);
        Real s = z[0] < 0 ? -1.0 : 1.0;
        return s * q * a2 * futh(u, a2 * z[1] + ph, z[0] >= 0);
    };
    m.d22 = [=](const Vec2& z) -> Vec3 {
        Real u = sp.u(z[0]);
        return a2 * a2 * fthth(u, a2 * z[1] + ph, z[0] >= 0);
    };

    m.model_forms = [=](const Vec2& z) {
        Real u = sp.u(z[0]), q = sp.q(u);
        Real th = a2 * z[1] + ph;
        Real ct = std::cos(th), st = std::sin(th);
        Real root = std::sqrt(1 + u * u * ct * ct);
        FundamentalForms f;
        f.g11 = a * a * q * q * (1 + u * u * ct * ct);
        f.g12 = 0;
        f.g22 = a * a * a2 * a2 * u * u;
        f.b11 = -a * q * q * ct * (2 + u * u * ct * ct) / root;
        f.b22 = -a * a2 * a2 * u * u * ct / root;
        f.b12 = a * q * u * a2 * st / root;
        f.has_sff = true;
        return f;
    };

    Real b = p.eta * kPi * kPi * p.sigma_x * p.sigma_x / (2.0 * p.delta * p.alpha1);
    Real z1max = 0.5 * b * chi2_3_upper(1e-6);
    m.z_domain = {-z1max, z1max, -kPi / a2, kPi / a2};

    m.projection_seeds = [=](const Vec3& x, std::vector<Vec2>& out) {
        Real rho = x.norm();
        if (rho < 1e-12) {
            out.push_back({0, 0});
            return;
        }
        Real ur = kPi * rho / (2 * p.delta);
        Vec3 xh = x / rho;
        for (int branch = 0; branch < 2; ++branch) {
            bool pos = branch == 0;
            Real sgn_th = pos ? -1.0 : 1.0; // 3rd direction component is -+ sin th
            Real t0 = std::asin(std::clamp(sgn_th * xh[2], -1.0, 1.0));
            for (int tsel = 0; tsel < 2; ++tsel) {
                Real th = tsel == 0 ? t0 : kPi - t0;
                Real ct = std::cos(th);
                if (std::abs(ct) < 1e-12) continue;
                Real u0;
                if (pos)
                    u0 = std::atan2(xh[0] / ct, xh[1] / ct);
                else
                    u0 = std::atan2(-xh[1] / ct, xh[0] / ct);
                Real k0 = std::round((ur - u0) / (2 * kPi));
                for (int dk = -1; dk <= 1; ++dk) {
                    Real u = u0 + 2 * kPi * (k0 + dk);
                    if (u < 0) continue;
                    Real z1 = (pos ? 1.0 : -1.0) * sp.etad * u * u / p.alpha1;
                    Real z2 = std::remainder(th - ph, 2 * kPi) / a2;
                    z2 = std::clamp(z2, -kPi / a2, kPi / a2);
                    out.push_back({z1, z2});
                }
            }
        }
    };
    return m;
}

// ---------------------------------------------------------------------------
// BPAM: keep the N largest-variance source components, scale to the power
// budget. The "surface" is the plane spanned by those components.
// ---------------------------------------------------------------------------
MappingSystem bpam_linear(const MappingParams& p, int M, int N) {
    require_positive(p);
    if (M != 3 || N != 2)
        throw std::invalid_argument("bpam_linear: this artifact is 3:2 only");
    MappingSystem m;
    m.kind = MappingKind::Bpam;
    m.name = "bpam";
    m.params = p;
    const Real beta = std::sqrt(p.p_max) / p.sigma_x;

    m.embed = [=](const Vec2& z) -> Vec3 { return {z[0] / beta, z[1] / beta, 0}; };
    m.d1 = [=](const Vec2&) -> Vec3 { return {1.0 / beta, 0, 0}; };
    m.d2 = [=](const Vec2&) -> Vec3 { return {0, 1.0 / beta, 0}; };
    m.d11 = [](const Vec2&) -> Vec3 { return Vec3::Zero(); };
    m.d12 = [](const Vec2&) -> Vec3 { return Vec3::Zero(); };
    m.d22 = [](const Vec2&) -> Vec3 { return Vec3::Zero(); };
    m.model_forms = [=](const Vec2&) {
        FundamentalForms f;
        f.g11 = f.g22 = 1.0 / (beta * beta);
        f.g12 = 0;
        f.has_sff = true;
        return f;
    };
    Real zmax = 5.0 * std::sqrt(p.p_max);
    m.z_domain = {-zmax, zmax, -zmax, zmax};
    m.projection_seeds = [=](const Vec3& x, std::vector<Vec2>& out) {
        out.push_back({beta * x[0], beta * x[1]});
    };
    return m;
}

MappingSystem make_mapping(MappingKind kind, const MappingParams& p) {
    switch (kind) {
        case MappingKind::Helicoid: return helicoid_surface(p);
        case MappingKind::HelicoidArcLength: return helicoid_arclength_variant(p);
        case MappingKind::Rcasd: return rcasd_surface(p);
        case MappingKind::Mscds: return mscds_surface(p);
        case MappingKind::Snasu: return snasu_surface(p);
        case MappingKind::Bpam: return bpam_linear(p);
    }
    throw std::invalid_argument("make_mapping: bad kind");
}

MappingSystem make_mapping(const std::string& name, const MappingParams& p) {
    return make_mapping(mapping_kind_from_string(name), p);
}

void to_json(nlohmann::json& j, const MappingParams& p) {
    j = nlohmann::json{{"delta", p.delta},
                       {"alpha1", p.alpha1},
                       {"alpha2", p.alpha2},
                       {"eta", p.eta},
                       {"sigma_x", p.sigma_x},
                       {"p_max", p.p_max},
                       {"R", p.R},
                       {"y2_power_correction", p.y2_power_correction},
                       {"a", p.a},
                       {"alpha0", p.alpha0},
                       {"B", p.B},
                       {"theta0_sign", p.theta0_sign},
                       {"phase", p.phase}};
}

void from_json(const nlohmann::json& j, MappingParams& p) {
    p = MappingParams{};
    j.at("delta").get_to(p.delta);
    j.at("alpha1").get_to(p.alpha1);
    j.at("alpha2").get_to(p.alpha2);
    if (j.contains("eta")) j.at("eta").get_to(p.eta);
    if (j.contains("sigma_x")) j.at("sigma_x").get_to(p.sigma_x);
    if (j.contains("p_max")) j.at("p_max").get_to(p.p_max);
    if (j.contains("R")) j.at("R").get_to(p.R);
    if (j.contains("y2_power_correction")) j.at("y2_power_correction").get_to(p.y2_power_correction);
    if (j.contains("a")) j.at("a").get_to(p.a);
    if (j.contains("alpha0")) j.at("alpha0").get_to(p.alpha0);
    if (j.contains("B")) j.at("B").get_to(p.B);
    if (j.contains("theta0_sign")) j.at("theta0_sign").get_to(p.theta0_sign);
    if (j.contains("phase")) j.at("phase").get_to(p.phase);
}

} // namespace skgeom
