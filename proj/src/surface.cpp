#include "skgeom/surface.hpp"

namespace skgeom {

namespace {

Real step1(const Vec2& u) { return 1e-6 * (1.0 + u.cwiseAbs().maxCoeff()); }
Real step2(const Vec2& u) { return 1e-4 * (1.0 + u.cwiseAbs().maxCoeff()); }

VecX fd_S1(const std::function<VecX(Vec2)>& f, const Vec2& u) {
    Real h = step1(u);
    return (f({u[0] + h, u[1]}) - f({u[0] - h, u[1]})) / (2 * h);
}
VecX fd_S2(const std::function<VecX(Vec2)>& f, const Vec2& u) {
    Real h = step1(u);
    return (f({u[0], u[1] + h}) - f({u[0], u[1] - h})) / (2 * h);
}
VecX fd_S11(const std::function<VecX(Vec2)>& f, const Vec2& u) {
    Real h = step2(u);
    return (f({u[0] + h, u[1]}) - 2 * f(u) + f({u[0] - h, u[1]})) / (h * h);
}
VecX fd_S22(const std::function<VecX(Vec2)>& f, const Vec2& u) {
    Real h = step2(u);
    return (f({u[0], u[1] + h}) - 2 * f(u) + f({u[0], u[1] - h})) / (h * h);
}
VecX fd_S12(const std::function<VecX(Vec2)>& f, const Vec2& u) {
    Real h = step2(u);
    return (f({u[0] + h, u[1] + h}) - f({u[0] + h, u[1] - h}) -
            f({u[0] - h, u[1] + h}) + f({u[0] - h, u[1] - h})) /
           (4 * h * h);
}

} // namespace

ParametricSurface make_surface(int dim, Rect domain, std::function<VecX(Vec2)> eval,
                               std::function<VecX(Vec2)> S1, std::function<VecX(Vec2)> S2,
                               std::function<VecX(Vec2)> S11, std::function<VecX(Vec2)> S12,
                               std::function<VecX(Vec2)> S22) {
    if (dim < 2) throw std::invalid_argument("make_surface: dim must be >= 2");
    ParametricSurface s;
    s.dim = dim;
    s.domain = domain;
    s.eval = std::move(eval);
    s.analytic_first = S1 && S2;
    s.analytic_second = S11 && S12 && S22;
    auto base = s.eval;
    s.S1 = S1 ? std::move(S1) : [base](Vec2 u) { return fd_S1(base, u); };
    s.S2 = S2 ? std::move(S2) : [base](Vec2 u) { return fd_S2(base, u); };
    s.S11 = S11 ? std::move(S11) : [base](Vec2 u) { return fd_S11(base, u); };
    s.S12 = S12 ? std::move(S12) : [base](Vec2 u) { return fd_S12(base, u); };
    s.S22 = S22 ? std::move(S22) : [base](Vec2 u) { return fd_S22(base, u); };
    return s;
}

FundamentalForms metric_tensor(const ParametricSurface& s, const Vec2& u) {
    VecX a = s.S1(u), b = s.S2(u);
    FundamentalForms f;
    f.g11 = a.squaredNorm();
    f.g12 = a.dot(b);
    f.g22 = b.squaredNorm();
    if (f.g() <= 1e-20)
        throw std::domain_error("metric_tensor: rank-deficient Jacobian (singular point)");
    return f;
}

Vec3 unit_normal(const ParametricSurface& s, const Vec2& u) {
    if (s.dim != 3)
        throw std::domain_error("unit_normal: defined for surfaces in R^3 only");
    Vec3 a = s.S1(u), b = s.S2(u);
    Vec3 n = a.cross(b);
    Real len = n.norm();
    if (len < 1e-10)
        throw std::domain_error("unit_normal: rank-deficient Jacobian");
    return n / len;
}

FundamentalForms second_fundamental_form(const ParametricSurface& s, const Vec2& u) {
    if (s.dim != 3)
        throw std::domain_error("second_fundamental_form: only codimension 1 in R^3");
    FundamentalForms f = metric_tensor(s, u);
    Vec3 n = unit_normal(s, u);
    f.b11 = n.dot(Vec3(s.S11(u)));
    f.b12 = n.dot(Vec3(s.S12(u)));
    f.b22 = n.dot(Vec3(s.S22(u)));
    f.has_sff = true;
    return f;
}

FundamentalForms fundamental_forms(const ParametricSurface& s, const Vec2& u) {
    return second_fundamental_form(s, u);
}

CurvatureReport principal_curvatures(const FundamentalForms& f) {
    CurvatureReport r;
    Real g = f.g();
    // kappa^2 - (b_ab g^ab) kappa + b/g = 0
    Real tr = f.b11 * f.ginv11() + 2.0 * f.b12 * f.ginv12() + f.b22 * f.ginv22();
    Real det = f.b() / g;
    Real disc = tr * tr / 4.0 - det;
    if (disc < -1e-12)
        throw std::runtime_error("principal_curvatures: negative discriminant");
    disc = std::max(disc, 0.0);
    Real root = std::sqrt(disc);
    Real ka = tr / 2.0 + root, kb = tr / 2.0 - root;
    if (std::abs(ka) >= std::abs(kb)) {
        r.kappa1 = ka;
        r.kappa2 = kb;
    } else {
        r.kappa1 = kb;
        r.kappa2 = ka;
    }
    r.K = det;
    r.H = tr / 2.0;
    r.is_umbilic = std::abs(r.kappa1 - r.kappa2) < 1e-9 * (1.0 + std::abs(r.kappa1));

    auto principal_dir = [&](Real k) -> Vec2 {
        // null space of (b - k g); pick the larger row for stability
        Real a11 = f.b11 - k * f.g11, a12 = f.b12 - k * f.g12;
        Real a21 = a12, a22 = f.b22 - k * f.g22;
        Vec2 d;
        if (std::hypot(a11, a12) >= std::hypot(a21, a22))
            d = {-a12, a11};
        else
            d = {-a22, a21};
        if (d.norm() < 1e-14) return {1, 0};
        // normalize in the metric
        Real len = std::sqrt(f.g11 * d[0] * d[0] + 2 * f.g12 * d[0] * d[1] +
                             f.g22 * d[1] * d[1]);
        return d / len;
    };
    if (r.is_umbilic) {
        r.dir1 = Vec2(1, 0) / std::sqrt(f.g11);
        Vec2 d2(-f.g12, f.g11);
        Real len = std::sqrt(f.g11 * d2[0] * d2[0] + 2 * f.g12 * d2[0] * d2[1] +
                             f.g22 * d2[1] * d2[1]);
        r.dir2 = d2 / len;
    } else {
        r.dir1 = principal_dir(r.kappa1);
        r.dir2 = principal_dir(r.kappa2);
    }
    return r;
}

Real normal_curvature(const FundamentalForms& f, const Vec2& du) {
    Real den = f.g11 * du[0] * du[0] + 2 * f.g12 * du[0] * du[1] + f.g22 * du[1] * du[1];
    if (den <= 0)
        throw std::domain_error("normal_curvature: zero direction");
    Real num = f.b11 * du[0] * du[0] + 2 * f.b12 * du[0] * du[1] + f.b22 * du[1] * du[1];
    return num / den;
}

ChristoffelSymbols christoffel_from_metric(
    const std::function<void(const Vec2&, Real&, Real&, Real&)>& metric, const Vec2& u) {
    Real h = 1e-5 * (1.0 + u.cwiseAbs().maxCoeff());
    Real g[2][2], dg[2][2][2]; // dg[k][a][b] = d g_ab / d u^k
    {
        Real a, b, c;
        metric(u, a, b, c);
        g[0][0] = a;
        g[0][1] = g[1][0] = b;
        g[1][1] = c;
    }
    for (int k = 0; k < 2; ++k) {
        Vec2 up = u, um = u;
        up[k] += h;
        um[k] -= h;
        Real ap, bp, cp, am, bm, cm;
        metric(up, ap, bp, cp);
        metric(um, am, bm, cm);
        dg[k][0][0] = (ap - am) / (2 * h);
        dg[k][0][1] = dg[k][1][0] = (bp - bm) / (2 * h);
        dg[k][1][1] = (cp - cm) / (2 * h);
    }
    Real det = g[0][0] * g[1][1] - g[0][1] * g[0][1];
    if (std::abs(det) < 1e-18)
        throw std::domain_error("christoffel: singular metric");
    Real ginv[2][2] = {{g[1][1] / det, -g[0][1] / det}, {-g[0][1] / det, g[0][0] / det}};

    ChristoffelSymbols cs;
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                Real sum = 0;
                for (int l = 0; l < 2; ++l) {
                    // Gamma_{ab l} of the 1st kind
                    Real first =
                        0.5 * (dg[a][b][l] + dg[b][l][a] - dg[l][a][b]);
                    sum += ginv[c][l] * first;
                }
                cs.sym[c][a][b] = sum;
            }
    return cs;
}

ChristoffelSymbols christoffel_symbols(const ParametricSurface& s, const Vec2& u) {
    auto metric = [&s](const Vec2& q, Real& g11, Real& g12, Real& g22) {
        VecX a = s.S1(q), b = s.S2(q);
        g11 = a.squaredNorm();
        g12 = a.dot(b);
        g22 = b.squaredNorm();
    };
    return christoffel_from_metric(metric, u);
}

ClassificationReport classify_surface(const ParametricSurface& s, int grid) {
    if (grid < 8)
        throw std::invalid_argument("classify_surface: need at least an 8x8 grid");
    ClassificationReport rep;
    rep.developable = rep.minimal = rep.coords_are_loc = rep.coords_are_geodesic = true;

    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            Vec2 u{s.domain.u1_lo +
                       (s.domain.u1_hi - s.domain.u1_lo) * (i + 0.5) / grid,
                   s.domain.u2_lo +
                       (s.domain.u2_hi - s.domain.u2_lo) * (j + 0.5) / grid};
            FundamentalForms f = fundamental_forms(s, u);
            CurvatureReport c = principal_curvatures(f);
            Real kscale = 1.0 + std::abs(c.kappa1);
            Real tol = 1e-6;

            Real vK = std::abs(c.K) / (kscale * kscale);
            Real vH = std::abs(c.H) / kscale;
            Real gm = std::sqrt(f.g11 * f.g22);
            Real vloc = std::max(std::abs(f.g12) / gm, std::abs(f.b12) / (gm * kscale));

            ChristoffelSymbols cs = christoffel_symbols(s, u);
            // Gamma^1_22 and Gamma^2_11, nondimensionalized by the metric
            Real v_g1 = std::abs(cs(0, 1, 1)) * std::sqrt(f.g11 / f.g22) / kscale;
            Real v_g2 = std::abs(cs(1, 0, 0)) * std::sqrt(f.g22 / f.g11) / kscale;
            Real vgeo = std::max(v_g1, v_g2);

            rep.max_violation_developable = std::max(rep.max_violation_developable, vK);
            rep.max_violation_minimal = std::max(rep.max_violation_minimal, vH);
            rep.max_violation_loc = std::max(rep.max_violation_loc, vloc);
            rep.max_violation_geodesic = std::max(rep.max_violation_geodesic, vgeo);

            rep.developable = rep.developable && vK < tol;
            rep.minimal = rep.minimal && vH < tol;
            rep.coords_are_loc = rep.coords_are_loc && vloc < tol;
            rep.coords_are_geodesic = rep.coords_are_geodesic && vgeo < tol;
        }
    }
    return rep;
}

bool ruled_developable_test(const ParametricCurve& indicatrix,
                            const ParametricCurve& generator, int samples) {
    Real lo = std::max(indicatrix.x_lo, generator.x_lo);
    Real hi = std::min(indicatrix.x_hi, generator.x_hi);
    if (!(lo < hi))
        throw std::invalid_argument("ruled_developable_test: disjoint parameter intervals");
    for (int i = 0; i < samples; ++i) {
        Real x = lo + (hi - lo) * (i + 0.5) / samples;
        Vec3 yd = indicatrix.d1(x);
        Vec3 z = generator.eval(x);
        Vec3 zd = generator.d1(x);
        Eigen::Matrix3d M;
        M.col(0) = yd;
        M.col(1) = z;
        M.col(2) = zd;
        if (std::abs(M.determinant()) >= 1e-8) return false;
    }
    return true;
}

Real weingarten_residual(const ParametricSurface& s, const Vec2& u) {
    FundamentalForms f = fundamental_forms(s, u);
    Vec3 s1 = s.S1(u), s2 = s.S2(u);
    Real h = 1e-6 * (1.0 + u.cwiseAbs().maxCoeff());
    auto n_at = [&](Vec2 q) { return unit_normal(s, q); };
    Vec3 n1 = (n_at({u[0] + h, u[1]}) - n_at({u[0] - h, u[1]})) / (2 * h);
    Vec3 n2 = (n_at({u[0], u[1] + h}) - n_at({u[0], u[1] - h})) / (2 * h);

    // n_a = -b_a^c S_c with b_a^c = b_{al} g^{lc}
    auto bmix = [&](int a, int c) {
        Real ba1 = (a == 0) ? f.b11 : f.b12;
        Real ba2 = (a == 0) ? f.b12 : f.b22;
        Real g1c = (c == 0) ? f.ginv11() : f.ginv12();
        Real g2c = (c == 0) ? f.ginv12() : f.ginv22();
        return ba1 * g1c + ba2 * g2c;
    };
    Vec3 r1 = n1 + bmix(0, 0) * s1 + bmix(0, 1) * s2;
    Vec3 r2 = n2 + bmix(1, 0) * s1 + bmix(1, 1) * s2;
    return std::max(r1.norm(), r2.norm());
}

Real gauss_formula_residual(const ParametricSurface& s, const Vec2& u) {
    FundamentalForms f = fundamental_forms(s, u);
    ChristoffelSymbols cs = christoffel_symbols(s, u);
    Vec3 s1 = s.S1(u), s2 = s.S2(u), n = unit_normal(s, u);
    Vec3 sab[2][2] = {{s.S11(u), s.S12(u)}, {s.S12(u), s.S22(u)}};
    Real bab[2][2] = {{f.b11, f.b12}, {f.b12, f.b22}};

    Real worst = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
            Vec3 r = sab[a][b] - cs(0, a, b) * s1 - cs(1, a, b) * s2 - bab[a][b] * n;
            worst = std::max(worst, r.norm());
        }
    return worst;
}

FundamentalForms covariant_metric_transform(const FundamentalForms& f, const Mat2& jac) {
    if (std::abs(jac.determinant()) < 1e-14)
        throw std::invalid_argument("covariant_metric_transform: singular Jacobian");
    Mat2 G;
    G << f.g11, f.g12, f.g12, f.g22;
    Mat2 Gt = jac.transpose() * G * jac;
    FundamentalForms out;
    out.g11 = Gt(0, 0);
    out.g12 = 0.5 * (Gt(0, 1) + Gt(1, 0));
    out.g22 = Gt(1, 1);
    return out;
}

} // namespace skgeom
