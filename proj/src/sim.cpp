#include "skgeom/sim.hpp"

#include "skgeom/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace skgeom {

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("SKGEOM_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) hw = std::min(hw, cap);
    }
    return hw;
}

EncodeGrid build_encode_grid(const MappingSystem& m, int grid_size) {
    EncodeGrid g;
    g.n = grid_size;
    g.domain = m.z_domain;
    g.points.reserve(static_cast<size_t>(grid_size) * grid_size);
    g.zs.reserve(static_cast<size_t>(grid_size) * grid_size);
    for (int i = 0; i < grid_size; ++i) {
        Real z1 = g.domain.u1_lo +
                  (g.domain.u1_hi - g.domain.u1_lo) * (i + 0.5) / grid_size;
        for (int j = 0; j < grid_size; ++j) {
            Real z2 = g.domain.u2_lo +
                      (g.domain.u2_hi - g.domain.u2_lo) * (j + 0.5) / grid_size;
            Vec2 z{z1, z2};
            g.zs.push_back(z);
            g.points.push_back(m.embed(z));
        }
    }
    return g;
}

namespace {

// Damped Gauss-Newton steps toward argmin ||x - S(z)||, clamped to the domain.
// Returns true when the tangential residual criterion is met.
bool refine(const MappingSystem& m, const Vec3& x, Vec2& z, int max_iters) {
    Real tol = 1e-8 * (1.0 + x.norm());
    for (int it = 0; it < max_iters; ++it) {
        Vec3 r = x - m.embed(z);
        Vec3 j1 = m.d1(z), j2 = m.d2(z);
        Real g11 = j1.squaredNorm(), g12 = j1.dot(j2), g22 = j2.squaredNorm();
        Real b1 = j1.dot(r), b2 = j2.dot(r);
        if (std::hypot(b1, b2) < tol) return true;
        Real det = g11 * g22 - g12 * g12;
        if (!(det > 1e-30) || !std::isfinite(det)) return false;
        Vec2 step{(g22 * b1 - g12 * b2) / det, (g11 * b2 - g12 * b1) / det};
        // keep steps from jumping folds
        Real span = 0.25 * std::max(m.z_domain.u1_hi - m.z_domain.u1_lo,
                                    m.z_domain.u2_hi - m.z_domain.u2_lo);
        Real len = step.norm();
        if (len > span) step *= span / len;
        Vec2 zn = m.z_domain.clamp(z + step);
        if ((zn - z).norm() < 1e-14 * (1.0 + z.norm())) {
            z = zn;
            Vec3 rr = x - m.embed(z);
            return std::hypot(m.d1(z).dot(rr), m.d2(z).dot(rr)) < tol;
        }
        z = zn;
    }
    Vec3 r = x - m.embed(z);
    return std::hypot(m.d1(z).dot(r), m.d2(z).dot(r)) < tol;
}

} // namespace

EncodeResult encode(const MappingSystem& m, const EncodeGrid& grid, const Vec3& x,
                    const ProjectionOpts& opts) {
    if (!x.allFinite()) throw std::domain_error("encode: non-finite source vector");

    struct Basin {
        Real d2 = kInf;
        int cell = -1;
        Vec2 z;
    };
    std::vector<Basin> basins(std::max(opts.basins, 1));

    const int n = grid.n;
    for (int idx = 0; idx < n * n; ++idx) {
        Real d2 = (grid.points[idx] - x).squaredNorm();
        if (d2 >= basins.back().d2) continue;
        int ci = idx / n, cj = idx % n;
        // merge with an existing basin if the cells are neighbors
        int merge = -1;
        for (size_t b = 0; b < basins.size(); ++b) {
            if (basins[b].cell < 0) continue;
            int bi = basins[b].cell / n, bj = basins[b].cell % n;
            if (std::abs(bi - ci) <= 2 && std::abs(bj - cj) <= 2) {
                merge = static_cast<int>(b);
                break;
            }
        }
        if (merge >= 0) {
            if (d2 < basins[merge].d2)
                basins[merge] = {d2, idx, grid.zs[idx]};
        } else {
            basins.back() = {d2, idx, grid.zs[idx]};
        }
        std::sort(basins.begin(), basins.end(),
                  [](const Basin& a, const Basin& b) { return a.d2 < b.d2; });
    }

    std::vector<Vec2> candidates;
    for (const auto& b : basins)
        if (b.cell >= 0) candidates.push_back(b.z);
    if (m.projection_seeds) m.projection_seeds(x, candidates);

    EncodeResult best;
    Real best_d2 = kInf;
    bool best_conv = false;
    for (Vec2 z : candidates) {
        z = m.z_domain.clamp(z);
        bool conv = refine(m, x, z, opts.refine_iters);
        Real d2 = (x - m.embed(z)).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best.z = z;
            best_conv = conv;
        }
    }
    best.converged = best_conv;
    return best;
}

Vec3 decode(const MappingSystem& m, const Vec2& z_received, bool* clamped) {
    Vec2 z = m.z_domain.clamp(z_received);
    if (clamped) *clamped = (z - z_received).norm() > 0;
    return m.embed(z);
}

SimResult run_simulation(const SimConfig& config) {
    if (config.n_samples < 1000)
        throw std::invalid_argument("run_simulation: need at least 1000 samples");
    const MappingSystem& m = config.mapping;
    const Real snr = ratio_from_db(config.snr_db);
    const Real sigma_n = std::sqrt(config.p_max / snr);
    const Real sx = config.sigma_x;
    const bool bpam = m.kind == MappingKind::Bpam;
    // MMSE shrink for the linear baseline
    const Real shrink = config.p_max / (config.p_max + sigma_n * sigma_n);

    EncodeGrid grid = build_encode_grid(m, config.projection.grid_size);
    DistortionBreakdown breakdown = analytic_breakdown(m, snr, !bpam);
    const Real weak_pred = breakdown.total(); // per-component prediction
    const Real anomaly_gate = 9.0 * weak_pred * m.source_dim; // (3 x rms norm)^2

    constexpr std::int64_t kBlock = 4096;
    const std::int64_t n_blocks = (config.n_samples + kBlock - 1) / kBlock;
    struct Partial {
        Real err2 = 0, z1sq = 0, z2sq = 0;
        std::int64_t anomalies = 0, nonconv = 0;
        bool bad = false;
    };
    std::vector<Partial> partials(n_blocks);

    std::atomic<std::int64_t> next_block{0};
    auto work = [&]() {
        for (;;) {
            std::int64_t blk = next_block.fetch_add(1);
            if (blk >= n_blocks) return;
            Partial acc;
            std::int64_t lo = blk * kBlock;
            std::int64_t hi = std::min(lo + kBlock, config.n_samples);
            for (std::int64_t i = lo; i < hi; ++i) {
                SampleRng rng(config.seed, static_cast<std::uint64_t>(i));
                Vec3 x = rng.gauss3(sx);
                EncodeResult enc = encode(m, grid, x, config.projection);
                if (!enc.converged) acc.nonconv++;
                acc.z1sq += enc.z[0] * enc.z[0];
                acc.z2sq += enc.z[1] * enc.z[1];
                Vec2 zr = enc.z + rng.gauss2(sigma_n);
                Vec3 xh;
                if (bpam)
                    xh = m.embed(m.z_domain.clamp(shrink * zr));
                else
                    xh = decode(m, zr);
                Real e2 = (x - xh).squaredNorm();
                if (!std::isfinite(e2)) {
                    acc.bad = true;
                    break;
                }
                acc.err2 += e2;
                if (e2 > anomaly_gate) acc.anomalies++;
            }
            partials[blk] = acc;
        }
    };

    int workers = std::min<std::int64_t>(worker_count(), n_blocks);
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    Real err2 = 0, z1sq = 0, z2sq = 0;
    std::int64_t anomalies = 0, nonconv = 0;
    for (const auto& pt : partials) {
        if (pt.bad)
            throw std::runtime_error("run_simulation: non-finite sample error");
        err2 += pt.err2;
        z1sq += pt.z1sq;
        z2sq += pt.z2sq;
        anomalies += pt.anomalies;
        nonconv += pt.nonconv;
    }

    SimResult res;
    res.n = config.n_samples;
    Real mean_err2_per_comp = err2 / (config.n_samples * m.source_dim);
    res.sdr_db = db_from_ratio(sx * sx / mean_err2_per_comp);
    res.emp_power[0] = z1sq / config.n_samples;
    res.emp_power[1] = z2sq / config.n_samples;
    res.anomaly_rate = static_cast<Real>(anomalies) / config.n_samples;
    res.nonconverged_rate = static_cast<Real>(nonconv) / config.n_samples;
    res.breakdown = breakdown;
    Real model_power = channel_model(m).total_power;
    Real emp_total = 0.5 * (res.emp_power[0] + res.emp_power[1]);
    res.power_warn = std::abs(emp_total / model_power - 1.0) > 0.05;
    return res;
}

Real slope_estimate(const std::vector<std::pair<Real, Real>>& pts) {
    if (pts.size() < 4)
        throw std::invalid_argument("slope_estimate: need at least 4 points");
    auto sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.back().first - sorted.front().first < 15.0)
        throw std::invalid_argument("slope_estimate: need >= 15 dB span");
    size_t start = sorted.size() / 2;
    if (sorted.size() - start < 2) start = sorted.size() - 2;
    Real sx = 0, sy = 0, sxx = 0, sxy = 0;
    Real n = static_cast<Real>(sorted.size() - start);
    for (size_t i = start; i < sorted.size(); ++i) {
        sx += sorted[i].first;
        sy += sorted[i].second;
        sxx += sorted[i].first * sorted[i].first;
        sxy += sorted[i].first * sorted[i].second;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace skgeom
