#include "skgeom/curve.hpp"

#include "skgeom/quad.hpp"

#include <memory>
#include <vector>

namespace skgeom {

namespace fd {

// Central differences. Step sizes balance truncation against roundoff at
// double precision; higher orders need wider stencils.
static Real h1(Real x) { return 1e-6 * (1.0 + std::abs(x)); }
static Real h2(Real x) { return 1e-4 * (1.0 + std::abs(x)); }
static Real h3(Real x) { return 1e-3 * (1.0 + std::abs(x)); }

VecX d1(const std::function<VecX(Real)>& f, Real x) {
    Real h = h1(x);
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

VecX d2(const std::function<VecX(Real)>& f, Real x) {
    Real h = h2(x);
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

VecX d3(const std::function<VecX(Real)>& f, Real x) {
    Real h = h3(x);
    return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) /
           (2.0 * h * h * h);
}

} // namespace fd

ParametricCurve make_curve(int dim, Real x_lo, Real x_hi,
                           std::function<VecX(Real)> eval,
                           std::function<VecX(Real)> d1,
                           std::function<VecX(Real)> d2,
                           std::function<VecX(Real)> d3) {
    if (dim < 2) throw std::invalid_argument("make_curve: dim must be >= 2");
    if (!(x_lo < x_hi)) throw std::invalid_argument("make_curve: empty domain");
    ParametricCurve c;
    c.dim = dim;
    c.x_lo = x_lo;
    c.x_hi = x_hi;
    c.eval = std::move(eval);
    c.analytic_d1 = static_cast<bool>(d1);
    c.analytic_d2 = static_cast<bool>(d2);
    c.analytic_d3 = static_cast<bool>(d3);
    auto base = c.eval;
    c.d1 = d1 ? std::move(d1) : [base](Real x) { return fd::d1(base, x); };
    c.d2 = d2 ? std::move(d2) : [base](Real x) { return fd::d2(base, x); };
    c.d3 = d3 ? std::move(d3) : [base](Real x) { return fd::d3(base, x); };
    return c;
}

Real arc_length(const ParametricCurve& curve, Real x0, Real x1) {
    auto speed = [&](Real x) {
        Real s = curve.d1(x).norm();
        if (!std::isfinite(s))
            throw std::domain_error("arc_length: non-finite derivative");
        return s;
    };
    return integrate(speed, x0, x1, 1e-10);
}

namespace {

// Monotone cubic (Fritsch-Carlson) interpolation through (xs, ys).
struct MonotoneCubic {
    std::vector<Real> x, y, m;

    void build(std::vector<Real> xs, std::vector<Real> ys) {
        x = std::move(xs);
        y = std::move(ys);
        size_t n = x.size();
        std::vector<Real> d(n - 1);
        for (size_t i = 0; i + 1 < n; ++i)
            d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        m.assign(n, 0.0);
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for (size_t i = 1; i + 1 < n; ++i)
            m[i] = (d[i - 1] * d[i] <= 0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
        for (size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0) {
                m[i] = m[i + 1] = 0;
                continue;
            }
            Real a = m[i] / d[i], b = m[i + 1] / d[i];
            Real s = a * a + b * b;
            if (s > 9.0) {
                Real t = 3.0 / std::sqrt(s);
                m[i] = t * a * d[i];
                m[i + 1] = t * b * d[i];
            }
        }
    }

    Real operator()(Real q) const {
        size_t lo = 0, hi = x.size() - 1;
        if (q <= x.front()) return y.front();
        if (q >= x.back()) return y.back();
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            (x[mid] <= q ? lo : hi) = mid;
        }
        Real h = x[lo + 1] - x[lo];
        Real t = (q - x[lo]) / h;
        Real t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y[lo] + (t3 - 2 * t2 + t) * h * m[lo] +
               (-2 * t3 + 3 * t2) * y[lo + 1] + (t3 - t2) * h * m[lo + 1];
    }
};

} // namespace

ParametricCurve reparametrize_by_arc_length(const ParametricCurve& curve) {
    constexpr int kTable = 2048;
    std::vector<Real> xs(kTable + 1), ls(kTable + 1);
    Real dx = (curve.x_hi - curve.x_lo) / kTable;

    auto speed = [&](Real x) { return curve.d1(x).norm(); };
    Real cum = 0;
    xs[0] = curve.x_lo;
    ls[0] = 0;
    for (int i = 1; i <= kTable; ++i) {
        Real a = curve.x_lo + (i - 1) * dx;
        Real b = curve.x_lo + i * dx;
        cum += integrate(speed, a, b, 1e-12);
        xs[i] = b;
        ls[i] = cum;
        if (speed(b) < 1e-12 || ls[i] <= ls[i - 1])
            throw std::domain_error(
                "reparametrize_by_arc_length: vanishing speed, singular parametrization");
    }
    Real total = cum;

    auto inv = std::make_shared<MonotoneCubic>();
    inv->build(ls, xs);
    auto base = curve;

    // interpolate, then two Newton corrections against the true length
    auto x_of_l = [inv, base, xs, ls](Real l) {
        l = std::clamp(l, ls.front(), ls.back());
        Real x = (*inv)(l);
        for (int it = 0; it < 2; ++it) {
            size_t lo = 0, hi = xs.size() - 1;
            while (hi - lo > 1) {
                size_t mid = (lo + hi) / 2;
                (xs[mid] <= x ? lo : hi) = mid;
            }
            auto sp = [&](Real q) { return base.d1(q).norm(); };
            Real l_at_x = ls[lo] + integrate(sp, xs[lo], x, 1e-13);
            Real s = sp(x);
            if (s <= 0) break;
            x -= (l_at_x - l) / s;
        }
        return std::clamp(x, base.x_lo, base.x_hi);
    };

    auto ev = [base, x_of_l](Real l) { return base.eval(x_of_l(l)); };
    auto d1 = [base, x_of_l](Real l) {
        Real x = x_of_l(l);
        VecX v = base.d1(x);
        return VecX(v / v.norm());
    };
    return make_curve(curve.dim, 0.0, total, ev, d1);
}

Real curvature(const ParametricCurve& curve, Real x) {
    VecX v = curve.d1(x), a = curve.d2(x);
    Real v2 = v.squaredNorm(), a2 = a.squaredNorm(), va = v.dot(a);
    Real disc = std::max(v2 * a2 - va * va, 0.0);
    return std::sqrt(disc) / (v2 * std::sqrt(v2));
}

FrenetFrame frenet(const ParametricCurve& curve, Real x) {
    if (curve.dim != 3)
        throw std::invalid_argument("frenet: frame requires a curve in R^3");
    Vec3 v = curve.d1(x), a = curve.d2(x), j = curve.d3(x);
    FrenetFrame f;
    Real v2 = v.squaredNorm(), a2 = a.squaredNorm(), va = v.dot(a);
    Real gram = std::max(v2 * a2 - va * va, 0.0);
    f.kappa = std::sqrt(gram) / (v2 * std::sqrt(v2));
    f.t = v.normalized();
    if (f.kappa < 1e-12) {
        f.degenerate = true;
        return f;
    }
    Vec3 an = a - va / v2 * v; // normal component of acceleration
    f.p = an.normalized();
    f.b = f.t.cross(f.p);
    Eigen::Matrix3d M;
    M.col(0) = v;
    M.col(1) = a;
    M.col(2) = j;
    f.tau = M.determinant() / gram;
    return f;
}

Vec3 canonical_form(Real kappa0, Real tau0, Real ell) {
    return {ell, 0.5 * kappa0 * ell * ell, kappa0 * tau0 * ell * ell * ell / 6.0};
}

OsculatingSphere osculating_sphere(const ParametricCurve& curve, Real x) {
    FrenetFrame f = frenet(curve, x);
    if (f.degenerate)
        throw std::domain_error("osculating_sphere: curvature vanishes");
    Real rho = 1.0 / f.kappa;

    // rho_dot = d(1/kappa)/dl = -kappa_dot / kappa^2, with kappa_dot taken
    // along arc length by differencing kappa in the curve parameter.
    Real h = 1e-4 * (1.0 + std::abs(x));
    Real dk_dx = (curvature(curve, x + h) - curvature(curve, x - h)) / (2.0 * h);
    Real kdot = dk_dx / curve.d1(x).norm();
    Real rho_dot = -kdot / (f.kappa * f.kappa);

    OsculatingSphere s;
    Vec3 pos = curve.eval(x);
    if (std::abs(f.tau) < 1e-8 * (1.0 + f.kappa)) {
        s.center = pos + rho * f.p;
        s.radius = rho;
        s.circle_fallback = true;
        return s;
    }
    Real q = rho_dot / f.tau;
    s.center = pos + rho * f.p + q * f.b;
    s.radius = std::sqrt(rho * rho + q * q);
    return s;
}

CanalTestResult canal_self_intersection_test(const CanalSurfaceSpec& spec, int samples) {
    if (spec.tube_radius <= 0)
        throw std::invalid_argument("canal test: tube radius must be positive");
    const auto& c = spec.spine;
    Real r = spec.tube_radius;
    CanalTestResult out;

    Real min_rho = kInf;
    for (int i = 0; i < samples; ++i) {
        Real x = c.x_lo + (c.x_hi - c.x_lo) * (i + 0.5) / samples;
        Real k = curvature(c, x);
        if (k > 1e-14) min_rho = std::min(min_rho, 1.0 / k);
    }
    out.worst_margin = min_rho - r;

    // condition (i): folds at least 2r apart. Pairwise over a fixed spine
    // sampling, skipping pairs closer than 4r along the curve itself.
    constexpr int kFold = 512;
    std::vector<VecX> pts(kFold);
    std::vector<Real> ell(kFold);
    Real cum = 0;
    auto speed = [&](Real q) { return c.d1(q).norm(); };
    Real prev = c.x_lo;
    for (int i = 0; i < kFold; ++i) {
        Real x = c.x_lo + (c.x_hi - c.x_lo) * i / (kFold - 1.0);
        if (i > 0) cum += integrate(speed, prev, x, 1e-9);
        prev = x;
        pts[i] = c.eval(x);
        ell[i] = cum;
    }
    Real total_len = cum;
    Real scale = 0;
    for (const auto& p : pts) scale = std::max(scale, p.norm());
    bool closed = (pts.front() - pts.back()).norm() < 1e-9 * (1.0 + scale);

    Real min_fold = kInf;
    for (int i = 0; i < kFold; ++i) {
        for (int j = i + 1; j < kFold; ++j) {
            Real dl = ell[j] - ell[i];
            if (closed) dl = std::min(dl, total_len - dl);
            if (dl < 4.0 * r) continue;
            min_fold = std::min(min_fold, (pts[i] - pts[j]).norm());
        }
    }
    out.min_fold_distance = min_fold;
    out.safe = (min_rho > r) && (min_fold >= 2.0 * r);
    return out;
}

Real noise_tube_radius(Real sigma_n, int N, Real b_n) {
    if (sigma_n < 0 || N < 2 || b_n <= 0)
        throw std::invalid_argument("noise_tube_radius: bad arguments");
    return std::sqrt((N - 1.0) / N * b_n * sigma_n * sigma_n);
}

} // namespace skgeom
