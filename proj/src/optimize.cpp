#include "skgeom/optimize.hpp"

#include "skgeom/rng.hpp"

#include <algorithm>

namespace skgeom {

Real total_distortion_model(MappingKind family, const MappingParams& p, Real snr) {
    MappingSystem m = make_mapping(family, p);
    Real sigma_n = std::sqrt(p.p_max / snr);
    return approximation_distortion(m) + weak_channel_distortion_closed(m, sigma_n);
}

Real channel_power_model(MappingKind family, const MappingParams& p) {
    return channel_model(make_mapping(family, p)).total_power;
}

std::vector<Real> nelder_mead(const std::function<Real(const std::vector<Real>&)>& f,
                              std::vector<Real> x0, Real scale, Real fatol, Real xatol,
                              int max_evals) {
    const size_t n = x0.size();
    std::vector<std::vector<Real>> xs(n + 1, x0);
    std::vector<Real> fs(n + 1);
    for (size_t i = 0; i < n; ++i)
        xs[i + 1][i] += (x0[i] != 0 ? scale * std::abs(x0[i]) : scale);
    int evals = 0;
    for (size_t i = 0; i <= n; ++i) {
        fs[i] = f(xs[i]);
        ++evals;
    }
    auto order = [&]() {
        std::vector<size_t> idx(n + 1);
        for (size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fs[a] < fs[b]; });
        std::vector<std::vector<Real>> xs2;
        std::vector<Real> fs2;
        for (size_t i : idx) {
            xs2.push_back(xs[i]);
            fs2.push_back(fs[i]);
        }
        xs = std::move(xs2);
        fs = std::move(fs2);
    };
    order();
    while (evals < max_evals) {
        Real fspread = fs[n] - fs[0];
        Real xspread = 0;
        for (size_t i = 0; i < n; ++i)
            xspread = std::max(xspread, std::abs(xs[n][i] - xs[0][i]));
        if (fspread < fatol && xspread < xatol) break;

        std::vector<Real> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t d = 0; d < n; ++d) centroid[d] += xs[i][d] / n;
        auto blend = [&](Real t) {
            std::vector<Real> y(n);
            for (size_t d = 0; d < n; ++d)
                y[d] = centroid[d] + t * (xs[n][d] - centroid[d]);
            return y;
        };
        auto xr = blend(-1.0);
        Real fr = f(xr);
        ++evals;
        if (fr < fs[0]) {
            auto xe = blend(-2.0);
            Real fe = f(xe);
            ++evals;
            if (fe < fr) {
                xs[n] = xe;
                fs[n] = fe;
            } else {
                xs[n] = xr;
                fs[n] = fr;
            }
        } else if (fr < fs[n - 1]) {
            xs[n] = xr;
            fs[n] = fr;
        } else {
            auto xc = blend(fr < fs[n] ? -0.5 : 0.5);
            Real fc = f(xc);
            ++evals;
            if (fc < std::min(fr, fs[n])) {
                xs[n] = xc;
                fs[n] = fc;
            } else {
                for (size_t i = 1; i <= n; ++i) {
                    for (size_t d = 0; d < n; ++d)
                        xs[i][d] = xs[0][d] + 0.5 * (xs[i][d] - xs[0][d]);
                    fs[i] = f(xs[i]);
                    ++evals;
                }
            }
        }
        order();
    }
    return xs[0];
}

namespace {

struct Vars {
    Real delta, alpha1, alpha2;
};

MappingParams assemble(const OptProblem& pr, const Vars& v) {
    MappingParams p = pr.base;
    p.delta = v.delta;
    p.alpha1 = v.alpha1;
    p.alpha2 = v.alpha2;
    return p;
}

// power on channel 2 always has the form C / alpha2^2
Real ch2_coeff(const OptProblem& pr) {
    MappingParams p = pr.base;
    p.delta = 1;
    p.alpha1 = 1;
    p.alpha2 = 1;
    MappingSystem m = make_mapping(pr.family, p);
    return channel_model(m).ch[1].variance;
}

} // namespace

OptResult optimize(const OptProblem& pr, Real snr_db, const MappingParams* warm) {
    const Real snr = ratio_from_db(snr_db);
    const Real pmax = pr.base.p_max;

    auto dist = [&](const Vars& v) {
        return total_distortion_model(pr.family, assemble(pr, v), snr);
    };
    auto power = [&](const Vars& v) {
        return channel_power_model(pr.family, assemble(pr, v));
    };

    auto from_log = [&](const std::vector<Real>& x) {
        Vars v{std::exp(x[0]), std::exp(x[1]), std::exp(x[2])};
        v.delta = std::clamp(v.delta, pr.delta_lo, pr.delta_hi);
        v.alpha1 = std::clamp(v.alpha1, pr.alpha_lo, pr.alpha_hi);
        v.alpha2 = std::clamp(v.alpha2, pr.alpha_lo, pr.alpha_hi);
        return v;
    };

    // Latin hypercube over the (log) box, plus the warm start.
    std::vector<std::vector<Real>> starts;
    {
        int k = std::max(pr.multistarts, 16);
        SampleRng rng(0x5eedULL);
        std::vector<std::vector<int>> perm(3, std::vector<int>(k));
        for (auto& pm : perm) {
            for (int i = 0; i < k; ++i) pm[i] = i;
            for (int i = k - 1; i > 0; --i)
                std::swap(pm[i], pm[rng.next_u64() % (i + 1)]);
        }
        Real lo[3] = {std::log(pr.delta_lo), std::log(pr.alpha_lo), std::log(pr.alpha_lo)};
        Real hi[3] = {std::log(pr.delta_hi), std::log(pr.alpha_hi), std::log(pr.alpha_hi)};
        for (int i = 0; i < k; ++i) {
            std::vector<Real> x(3);
            for (int d = 0; d < 3; ++d) {
                Real frac = (perm[d][i] + rng.next_u01()) / k;
                x[d] = lo[d] + (hi[d] - lo[d]) * frac;
            }
            starts.push_back(std::move(x));
        }
        if (warm)
            starts.push_back({std::log(warm->delta), std::log(warm->alpha1),
                              std::log(warm->alpha2)});
    }

    // penalized descent with escalating penalty weight
    auto solve_from = [&](std::vector<Real> x0) {
        Real mu = 1e2;
        std::vector<Real> x = std::move(x0);
        for (int round = 0; round < 12; ++round) {
            auto fpen = [&](const std::vector<Real>& q) {
                Vars v = from_log(q);
                Real viol = std::max(0.0, power(v) - pmax);
                return dist(v) + mu * viol * viol;
            };
            x = nelder_mead(fpen, x, round == 0 ? 0.25 : 0.02);
            if (std::max(0.0, power(from_log(x)) - pmax) < 1e-8) break;
            mu *= 10;
        }
        return x;
    };

    Vars best{};
    Real best_f = kInf;
    bool found = false;
    for (const auto& s : starts) {
        Vars v = from_log(solve_from(s));
        if (power(v) > pmax * (1 + 1e-6)) continue;
        Real fv = dist(v);
        // deterministic tie handling: value first, then lexicographic
        bool better = fv < best_f - 1e-15 ||
                      (std::abs(fv - best_f) <= 1e-15 &&
                       std::tie(v.delta, v.alpha1, v.alpha2) <
                           std::tie(best.delta, best.alpha1, best.alpha2));
        if (!found || better) {
            best = v;
            best_f = fv;
            found = true;
        }
    }
    OptResult out;
    if (!found) return out; // infeasibility report: feasible stays false

    // active-set polish: solve the budget for alpha2 and descend on the rest
    Real c2 = ch2_coeff(pr);
    bool active = std::abs(power(best) - pmax) < 1e-4 * pmax;
    if (active) {
        auto alpha2_on_boundary = [&](Real delta, Real alpha1) -> Real {
            Vars v{delta, alpha1, 1.0};
            Real var1 = 2.0 * power(v) - c2; // channel-1 power
            Real rem = 2.0 * pmax - var1;
            if (rem <= 0) return -1;
            return std::sqrt(c2 / rem);
        };
        auto fred = [&](const std::vector<Real>& q) {
            Real d = std::clamp(std::exp(q[0]), pr.delta_lo, pr.delta_hi);
            Real a1 = std::clamp(std::exp(q[1]), pr.alpha_lo, pr.alpha_hi);
            Real a2 = alpha2_on_boundary(d, a1);
            if (a2 <= 0) return 1e100;
            return dist({d, a1, a2});
        };
        std::vector<Real> q0{std::log(best.delta), std::log(best.alpha1)};
        std::vector<Real> q = nelder_mead(fred, q0, 0.01, 1e-16, 1e-13);
        q = nelder_mead(fred, q, 1e-4, 1e-16, 1e-14);
        Real d = std::clamp(std::exp(q[0]), pr.delta_lo, pr.delta_hi);
        Real a1 = std::clamp(std::exp(q[1]), pr.alpha_lo, pr.alpha_hi);
        Real a2 = alpha2_on_boundary(d, a1);
        if (a2 > 0 && fred(q) <= best_f + 1e-12) {
            best = {d, a1, a2};
            best_f = dist(best);
        }
    }

    out.params = assemble(pr, best);
    out.d_total = best_f;
    out.feasible = true;
    out.active_constraint = active;

    // KKT data from central differences in the original coordinates
    auto grad = [&](const std::function<Real(const Vars&)>& f, const Vars& v) {
        Vec3 g;
        Real vals[3] = {v.delta, v.alpha1, v.alpha2};
        for (int d = 0; d < 3; ++d) {
            Real h = 1e-6 * (1.0 + std::abs(vals[d]));
            Vars vp = v, vm = v;
            (d == 0 ? vp.delta : d == 1 ? vp.alpha1 : vp.alpha2) += h;
            (d == 0 ? vm.delta : d == 1 ? vm.alpha1 : vm.alpha2) -= h;
            g[d] = (f(vp) - f(vm)) / (2 * h);
        }
        return g;
    };
    // stationarity of D + lambda (P - pmax): grad D = -lambda grad P
    Vec3 gD = grad(dist, best);
    if (active) {
        Vec3 gP = grad(power, best);
        out.lambda = std::max(0.0, -gD.dot(gP) / gP.squaredNorm());
        out.kkt_residual = (gD + out.lambda * gP).norm();
    } else {
        out.lambda = 0;
        out.kkt_residual = gD.norm();
    }
    return out;
}

std::vector<SweepPoint> sweep(const OptProblem& pr, const std::vector<Real>& snr_grid_db) {
    std::vector<SweepPoint> out;
    const MappingParams* warm = nullptr;
    MappingParams last;
    for (Real snr_db : snr_grid_db) {
        SweepPoint pt;
        pt.snr_db = snr_db;
        try {
            pt.opt = optimize(pr, snr_db, warm);
            if (!pt.opt.feasible) {
                pt.error = "no feasible start";
            } else {
                pt.ok = true;
                MappingSystem m = make_mapping(pr.family, pt.opt.params);
                pt.sdr_analytical_db = analytic_sdr_db(m, snr_db);
                last = pt.opt.params;
                warm = &last;
            }
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

} // namespace skgeom
