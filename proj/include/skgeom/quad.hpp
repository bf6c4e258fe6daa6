#pragma once

#include "skgeom/common.hpp"

namespace skgeom {

namespace detail {

template <class F>
Real simpson(const F& f, Real a, Real fa, Real b, Real fb, Real m, Real fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// `floor_tol` is a fixed absolute floor set from the root-level magnitude;
// unlike `tol` it does not halve with depth, which keeps finite-difference
// noise from driving the recursion to the depth cap.
template <class F>
Real adaptive_simpson_rec(const F& f, Real a, Real fa, Real b, Real fb, Real m,
                          Real fm, Real whole, Real tol, Real floor_tol, int depth) {
    Real lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    Real flm = f(lm), frm = f(rm);
    Real left = simpson(f, a, fa, m, fm, lm, flm);
    Real right = simpson(f, m, fm, b, fb, rm, frm);
    Real err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * std::max(tol, floor_tol) ||
        b - a < 1e-13 * (1.0 + std::abs(a) + std::abs(b)))
        return left + right + err / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, floor_tol,
                                depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, floor_tol,
                                depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature with absolute tolerance.
template <class F>
Real integrate(const F& f, Real a, Real b, Real tol = 1e-10, int max_depth = 24) {
    if (a == b) return 0.0;
    Real fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw std::domain_error("integrate: non-finite integrand");
    Real whole = detail::simpson(f, a, fa, b, fb, m, fm);
    Real scale = std::abs(b - a) * (std::abs(fa) + 4 * std::abs(fm) + std::abs(fb)) / 6.0;
    Real floor_tol = 5e-13 * scale;
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, floor_tol,
                                        max_depth);
}

/// Integrate over [a,b] split into n panels (for long oscillatory ranges).
template <class F>
Real integrate_panels(const F& f, Real a, Real b, int n_panels, Real tol = 1e-10) {
    Real sum = 0;
    Real h = (b - a) / n_panels;
    for (int i = 0; i < n_panels; ++i)
        sum += integrate(f, a + i * h, a + (i + 1) * h, tol / n_panels);
    return sum;
}

/// Bisection root finder for a continuous sign-changing function.
template <class F>
Real bisect(const F& f, Real lo, Real hi, Real xtol = 1e-12, int max_iter = 200) {
    Real flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw std::invalid_argument("bisect: no sign change on interval");
    for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
        Real mid = 0.5 * (lo + hi);
        Real fm = f(mid);
        if (fm == 0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace skgeom
