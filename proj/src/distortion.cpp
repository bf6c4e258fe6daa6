#include "skgeom/distortion.hpp"

#include "skgeom/quad.hpp"
#include "skgeom/surface.hpp"

namespace skgeom {

namespace {

ChannelStats gaussian_stats(Real var) {
    ChannelStats s;
    s.variance = var;
    s.family = PdfFamily::Gaussian;
    Real sd = std::sqrt(var);
    s.pdf = [sd](Real z) {
        return std::exp(-0.5 * z * z / (sd * sd)) / (sd * std::sqrt(2 * kPi));
    };
    s.sample = [sd](SampleRng& rng) { return sd * rng.next_gauss(); };
    return s;
}

ChannelStats double_rayleigh_stats(Real ups) {
    ChannelStats s;
    s.variance = 2 * ups * ups;
    s.family = PdfFamily::DoubleRayleigh;
    s.pdf = [ups](Real z) {
        return 0.5 * std::abs(z) / (ups * ups) * std::exp(-0.5 * z * z / (ups * ups));
    };
    s.sample = [ups](SampleRng& rng) {
        Real r = ups * std::sqrt(-2.0 * std::log(rng.next_u01()));
        return rng.next_u01() < 0.5 ? -r : r;
    };
    return s;
}

ChannelStats laplace_stats(Real mu) {
    ChannelStats s;
    s.variance = 2 * mu * mu;
    s.family = PdfFamily::Laplace;
    s.pdf = [mu](Real z) { return 0.5 / mu * std::exp(-std::abs(z) / mu); };
    s.sample = [mu](SampleRng& rng) {
        Real e = -mu * std::log(rng.next_u01());
        return rng.next_u01() < 0.5 ? -e : e;
    };
    return s;
}

// symmetric gamma with shape 3/2: |z| = (b/2) chi^2_3
ChannelStats double_gamma32_stats(Real b) {
    ChannelStats s;
    s.variance = 15.0 / 4.0 * b * b;
    s.family = PdfFamily::DoubleGamma;
    Real norm = 1.0 / (2.0 * std::tgamma(1.5) * std::pow(b, 1.5));
    s.pdf = [b, norm](Real z) {
        return norm * std::sqrt(std::abs(z)) * std::exp(-std::abs(z) / b);
    };
    s.sample = [b](SampleRng& rng) {
        Real g1 = rng.next_gauss(), g2 = rng.next_gauss(), g3 = rng.next_gauss();
        Real v = 0.5 * b * (g1 * g1 + g2 * g2 + g3 * g3);
        return rng.next_u01() < 0.5 ? -v : v;
    };
    return s;
}

// f(z) = (a2/4) |sin(a2 z)| on [-pi/a2, pi/a2]
ChannelStats sine_stats(Real a2) {
    ChannelStats s;
    s.variance = 2.0 * (kPi * kPi / 4.0 - 1.0) / (a2 * a2);
    s.family = PdfFamily::Sine;
    s.pdf = [a2](Real z) {
        if (std::abs(z) > kPi / a2) return 0.0;
        return a2 / 4.0 * std::abs(std::sin(a2 * z));
    };
    s.sample = [a2](SampleRng& rng) {
        Real u = std::acos(1.0 - 2.0 * rng.next_u01()); // pdf sin(u)/2 on [0,pi]
        Real z = u / a2;
        return rng.next_u01() < 0.5 ? -z : z;
    };
    return s;
}

} // namespace

ChannelModel channel_model(const MappingSystem& m) {
    const MappingParams& p = m.params;
    ChannelModel cm;
    switch (m.kind) {
        case MappingKind::Helicoid: {
            Real ups = (kPi * p.sigma_x / p.R) / p.alpha1;
            cm.ch[0] = double_rayleigh_stats(ups);
            Real var_y2 = std::pow(kPi * p.sigma_x / p.delta, 2) +
                          (p.y2_power_correction ? 0.5 : 0.0);
            cm.ch[1] = gaussian_stats(var_y2 / (p.alpha2 * p.alpha2));
            break;
        }
        case MappingKind::HelicoidArcLength: {
            Real ups = (kPi * p.sigma_x / p.R);
            cm.ch[0] = double_rayleigh_stats(ups);
            cm.ch[1] = gaussian_stats(std::pow(kPi * p.sigma_x / p.delta, 2));
            break;
        }
        case MappingKind::Rcasd:
        case MappingKind::Mscds: {
            Real mu = 2.0 * p.eta * kPi * kPi * p.sigma_x * p.sigma_x /
                      (p.delta * p.alpha1);
            cm.ch[0] = laplace_stats(mu);
            Real var2 = (m.kind == MappingKind::Rcasd)
                            ? std::pow(p.sigma_x / p.alpha2, 2)
                            : std::pow(p.sigma_x / (p.alpha2 * p.B), 2);
            cm.ch[1] = gaussian_stats(var2);
            break;
        }
        case MappingKind::Snasu: {
            Real b = p.eta * kPi * kPi * p.sigma_x * p.sigma_x /
                     (2.0 * p.delta * p.alpha1);
            cm.ch[0] = double_gamma32_stats(b);
            cm.ch[1] = sine_stats(p.alpha2);
            break;
        }
        case MappingKind::Bpam: {
            cm.ch[0] = gaussian_stats(p.p_max);
            cm.ch[1] = gaussian_stats(p.p_max);
            break;
        }
    }
    cm.total_power = 0.5 * (cm.ch[0].variance + cm.ch[1].variance);
    return cm;
}

Real opta_sdr(Real snr, int M, int N) {
    if (snr < 0) throw std::invalid_argument("opta_sdr: snr must be >= 0");
    return std::pow(1.0 + snr, static_cast<Real>(N) / M);
}

Real bpam_sdr(Real snr, int M, int N) {
    if (N > M) throw std::invalid_argument("bpam_sdr: N > M not handled");
    return M / ((M - N) + N / (1.0 + snr));
}

Real m1_channel_distortion_3rd(Real g11, Real kappa, Real tau, Real sigma_n) {
    Real s2 = sigma_n * sigma_n;
    return g11 * s2 + 0.75 * kappa * kappa * s2 * s2 +
           5.0 / 12.0 * kappa * kappa * tau * tau * s2 * s2 * s2;
}

Real one_n_weak_noise_2nd(Real g11, Real kappa, Real sigma_n, bool third_term) {
    if (g11 <= 0) throw std::invalid_argument("one_n_weak_noise_2nd: g11 must be > 0");
    Real s2 = sigma_n * sigma_n;
    Real k2 = kappa * kappa;
    Real f = 1.0 + 0.25 * s2 * k2;
    if (third_term) f += 5.0 / 48.0 * s2 * s2 * k2 * k2;
    return s2 / g11 * f;
}

Real mn_pointwise_distortion(const std::vector<std::pair<Real, Real>>& metrics,
                             Real sigma_n, int M, MapMode mode) {
    if (metrics.empty())
        throw std::invalid_argument("mn_pointwise_distortion: empty metric list");
    Real s2 = sigma_n * sigma_n;
    Real sum = 0;
    for (auto [g, k] : metrics) {
        if (mode == MapMode::Expansion)
            sum += 1.0 / g * (1.0 + 0.25 * s2 * k * k);
        else
            sum += g + 0.75 * s2 * k * k;
    }
    return s2 / M * sum;
}

namespace {

struct Domain1 {
    Real lo, hi;
    bool symmetric;   // integrate [max(lo,cut), hi] and double
    Real inner_cut;   // exclude |z| < cut (metric model validity)
    bool sqrt_substitution; // integrate in w = sqrt(z) to tame 1/z factors
};

Real integrate_channel(const std::function<Real(Real)>& f, const ChannelStats& st,
                       const Domain1& dom) {
    auto h = [&](Real z) { return f(z) * st.pdf(z); };
    auto run = [](const std::function<Real(Real)>& g, Real lo, Real hi) {
        // crude scale first so the tolerance is relative, not absolute
        Real scale = 0;
        const int k = 64;
        for (int i = 0; i < k; ++i)
            scale += std::abs(g(lo + (hi - lo) * (i + 0.5) / k)) * (hi - lo) / k;
        return integrate_panels(g, lo, hi, 16, std::max(1e-8 * scale, 1e-14));
    };
    if (!dom.symmetric) return run(h, dom.lo, dom.hi);
    Real a = std::max(dom.inner_cut, 0.0);
    if (dom.sqrt_substitution) {
        auto hw = [&](Real w) { return 2.0 * w * h(w * w); };
        return 2.0 * run(hw, std::sqrt(a), std::sqrt(dom.hi));
    }
    return 2.0 * run(h, a, dom.hi);
}

} // namespace

Real weak_channel_distortion_integral(const MappingSystem& m, Real sigma_n) {
    ChannelModel cm = channel_model(m);
    auto check_norm = [&](const ChannelStats& st, Real lo, Real hi) {
        Real mass = integrate_panels(st.pdf, lo, hi, 16, 1e-8);
        if (std::abs(mass - 1.0) > 1e-3)
            throw std::domain_error("weak_channel_distortion_integral: pdf not normalized");
    };
    check_norm(cm.ch[0], m.z_domain.u1_lo * 1.5, m.z_domain.u1_hi * 1.5);
    check_norm(cm.ch[1], m.z_domain.u2_lo * 1.5, m.z_domain.u2_hi * 1.5);

    const MappingParams& p = m.params;
    Domain1 d1{m.z_domain.u1_lo, m.z_domain.u1_hi, true, 0.0, false};
    if (m.kind == MappingKind::Rcasd || m.kind == MappingKind::Mscds)
        d1.inner_cut = p.eta * p.delta / p.alpha1; // innermost spiral coil
    if (m.kind == MappingKind::Snasu) d1.sqrt_substitution = true;

    auto trace_at = [&](Real z1, Real z2) {
        Vec2 z{z1, z2};
        return m.d1(z).squaredNorm() + m.d2(z).squaredNorm();
    };
    auto outer = [&](Real z1) {
        auto inner = [&](Real z2) { return trace_at(z1, z2); };
        Domain1 d2{m.z_domain.u2_lo, m.z_domain.u2_hi, false, 0, false};
        return integrate_channel(inner, cm.ch[1], d2);
    };
    Real mean_trace = integrate_channel(outer, cm.ch[0], d1);
    return sigma_n * sigma_n / m.source_dim * mean_trace;
}

Real weak_channel_distortion_closed(const MappingSystem& m, Real sigma_n,
                                    bool snasu_paper_series) {
    const MappingParams& p = m.params;
    Real s2 = sigma_n * sigma_n;
    switch (m.kind) {
        case MappingKind::Helicoid: {
            Real sz1 = 2.0 * std::pow(kPi * p.sigma_x / p.R, 2) / (p.alpha1 * p.alpha1);
            return s2 / (3.0 * kPi * kPi) *
                   (std::pow(p.delta * p.alpha2, 2) +
                    std::pow(p.R * p.alpha1, 2) * (1.0 + p.alpha2 * p.alpha2 * sz1));
        }
        case MappingKind::Rcasd:
            return s2 * (p.alpha1 * p.alpha1 + p.alpha2 * p.alpha2) / 3.0;
        case MappingKind::Mscds: {
            Real I2 = p.alpha2 * p.alpha2 *
                      (p.B * p.B + 4.0 * p.a * p.a * p.sigma_x * p.sigma_x / (p.B * p.B));
            // I1 has no closed form; integrate g11 under the channel pdfs
            ChannelModel cm = channel_model(m);
            Domain1 dz1{m.z_domain.u1_lo, m.z_domain.u1_hi, true,
                        p.eta * p.delta / p.alpha1, false};
            auto outer = [&](Real z1) {
                auto inner = [&](Real z2) {
                    return m.d1({z1, z2}).squaredNorm();
                };
                Domain1 dz2{m.z_domain.u2_lo, m.z_domain.u2_hi, false, 0, false};
                return integrate_channel(inner, cm.ch[1], dz2);
            };
            Real I1 = integrate_channel(outer, cm.ch[0], dz1);
            return s2 * (I1 + I2) / 3.0;
        }
        case MappingKind::Snasu: {
            Real e = p.eta, sx2 = p.sigma_x * p.sigma_x;
            Real w = p.delta * p.alpha1;
            if (snasu_paper_series) {
                Real sz1 = 15.0 * std::pow(e * kPi * kPi * sx2, 2) / (16.0 * w * w);
                Real t1 = 4.0 * p.alpha1 * p.delta / (e * kPi * kPi) * (1.0 + sz1);
                Real t2 = 2.0 * p.alpha1 * p.alpha1 / (3.0 * e * e * kPi * kPi);
                return s2 * (t1 + t2 + 6.0 * p.alpha2 * p.alpha2 * sx2) / 3.0;
            }
            // gamma moments carried exactly: E{1/|z1|} = 2/b and E{rho^2} = 3 sx^2
            Real t1 = 4.0 * w * w / (e * e * std::pow(kPi, 4) * sx2);
            Real t2 = 2.0 * p.alpha1 * p.alpha1 / (3.0 * e * e * kPi * kPi);
            Real t3 = 3.0 * p.alpha2 * p.alpha2 * sx2;
            return s2 * (t1 + t2 + t3) / 3.0;
        }
        case MappingKind::HelicoidArcLength:
        case MappingKind::Bpam: {
            // trace of the (constant-ish) model metric
            FundamentalForms f = m.model_forms(Vec2::Zero());
            return s2 * (f.g11 + f.g22) / 3.0;
        }
    }
    throw std::logic_error("weak_channel_distortion_closed: unreachable");
}

Real uniform_approx_bound(Real delta, int M, int N) {
    if (delta < 0) throw std::invalid_argument("uniform_approx_bound: delta < 0");
    return static_cast<Real>(M - N) / (4.0 * M * (M - N + 2)) * delta * delta;
}

Real helicoid_approx_fit(Real delta) {
    if (delta < 0 || delta > 3)
        throw std::out_of_range("helicoid_approx_fit: valid for delta in [0,3]");
    return -0.0036 * delta * delta * delta + 0.024 * delta * delta + 0.0056 * delta;
}

Real approximation_distortion(const MappingSystem& m) {
    switch (m.kind) {
        case MappingKind::Helicoid:
        case MappingKind::HelicoidArcLength:
            return helicoid_approx_fit(m.params.delta);
        case MappingKind::Rcasd:
        case MappingKind::Mscds:
        case MappingKind::Snasu:
            return uniform_approx_bound(m.params.delta, 3, 2);
        case MappingKind::Bpam:
            // one of three components discarded
            return m.params.sigma_x * m.params.sigma_x / 3.0;
    }
    throw std::logic_error("approximation_distortion: unreachable");
}

Real splitting_slope(int m, int n, MapMode mode) {
    if (n < 1 || m < n) throw std::invalid_argument("splitting_slope: need m >= n >= 1");
    if (mode == MapMode::Reduction) return 1.0 / m;
    return static_cast<Real>(n);
}

Real rcasd_kappa_const(Real sigma_x, Real eta) {
    Real t = 2.0 * eta * kPi * kPi * sigma_x * sigma_x;
    return 2.0 * t * t;
}

Real rcasd_high_snr_delta(Real snr, Real sigma_x, Real eta) {
    return std::pow(6.0 * rcasd_kappa_const(sigma_x, eta) / snr, 0.25);
}

Real rcasd_delta_exact(Real snr, Real sigma_x, Real eta) {
    Real k = rcasd_kappa_const(sigma_x, eta);
    Real sx2 = sigma_x * sigma_x;
    auto f = [&](Real d) {
        return std::pow(d, 4) / 18.0 - std::sqrt(k) * sx2 * d / (3.0 * snr) -
               k / (3.0 * snr);
    };
    return bisect(f, 1e-4, 10.0, 1e-12);
}

Real rcasd_boundary_alpha1_sq(Real delta, Real alpha2, Real p_max, Real sigma_x,
                              Real eta) {
    Real k = rcasd_kappa_const(sigma_x, eta);
    Real den = delta * delta *
               (2.0 * alpha2 * alpha2 * p_max - sigma_x * sigma_x);
    if (den <= 0)
        throw std::domain_error("rcasd_boundary_alpha1_sq: infeasible alpha2");
    return alpha2 * alpha2 * k / den;
}

Real rcasd_kkt_alpha2(Real delta, Real p_max, Real sigma_x, Real eta) {
    Real k = rcasd_kappa_const(sigma_x, eta);
    return std::sqrt(sigma_x * (sigma_x + std::sqrt(k) / delta) / (2.0 * p_max));
}

Real snasu_z1_pdf(const MappingParams& p, Real z) {
    Real b = p.eta * kPi * kPi * p.sigma_x * p.sigma_x / (2.0 * p.delta * p.alpha1);
    Real norm = 1.0 / (2.0 * std::tgamma(1.5) * std::pow(b, 1.5));
    return norm * std::sqrt(std::abs(z)) * std::exp(-std::abs(z) / b);
}

Real snasu_z2_pdf(const MappingParams& p, Real z) {
    if (std::abs(z) > kPi / p.alpha2) return 0.0;
    return p.alpha2 / 4.0 * std::abs(std::sin(p.alpha2 * z));
}

Real mean_sq_curvature(const MappingSystem& m) {
    if (m.kind == MappingKind::Bpam) return 0.0;
    ChannelModel cm = channel_model(m);
    const MappingParams& p = m.params;
    Domain1 d1{m.z_domain.u1_lo, m.z_domain.u1_hi, true, 0.0, false};
    if (m.kind == MappingKind::Rcasd || m.kind == MappingKind::Mscds)
        d1.inner_cut = p.eta * p.delta / p.alpha1;
    else
        d1.inner_cut = 1e-3 * m.z_domain.u1_hi;
    if (m.kind == MappingKind::Snasu) d1.sqrt_substitution = true;

    ParametricSurface s = m.surface();
    auto k2_at = [&](Real z1, Real z2) {
        CurvatureReport c = principal_curvatures(fundamental_forms(s, {z1, z2}));
        return c.kappa1 * c.kappa1 + c.kappa2 * c.kappa2;
    };
    auto outer = [&](Real z1) {
        auto inner = [&](Real z2) { return k2_at(z1, z2); };
        Domain1 d2{m.z_domain.u2_lo, m.z_domain.u2_hi, false, 0, false};
        return integrate_channel(inner, cm.ch[1], d2);
    };
    return integrate_channel(outer, cm.ch[0], d1);
}

DistortionBreakdown analytic_breakdown(const MappingSystem& m, Real snr,
                                       bool with_second_order) {
    DistortionBreakdown b;
    Real sigma_n = std::sqrt(m.params.p_max / snr);
    b.eps_approx = approximation_distortion(m);
    if (m.kind == MappingKind::Bpam) {
        // two kept channels, MMSE scaling
        Real sx2 = m.params.sigma_x * m.params.sigma_x;
        b.eps_ch_weak = 2.0 * sx2 / (1.0 + snr) / 3.0;
        return b;
    }
    b.eps_ch_weak = weak_channel_distortion_closed(m, sigma_n);
    if (with_second_order)
        b.eps_ch_2nd = 0.75 * std::pow(sigma_n, 4) / m.source_dim * mean_sq_curvature(m);
    return b;
}

Real analytic_sdr_db(const MappingSystem& m, Real snr_db) {
    DistortionBreakdown b = analytic_breakdown(m, ratio_from_db(snr_db));
    Real sx2 = m.params.sigma_x * m.params.sigma_x;
    return db_from_ratio(sx2 / (b.eps_approx + b.eps_ch_weak));
}

} // namespace skgeom
