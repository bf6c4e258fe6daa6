#include "skgeom/sim.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace skgeom;

namespace {

MappingSystem rcasd30() {
    return rcasd_surface({.delta = 0.60724, .alpha1 = 5.54332, .alpha2 = 2.04394});
}

} // namespace

TEST_CASE("projection recovers points already on the surface") {
    std::vector<MappingSystem> maps{
        helicoid_surface({.delta = kPi, .R = kPi}),
        rcasd30(),
        snasu_surface({.delta = 0.489, .alpha1 = 2.7486, .alpha2 = 2.0384}),
        bpam_linear({}),
    };
    for (const auto& m : maps) {
        EncodeGrid grid = build_encode_grid(m, 96);
        SampleRng rng(3);
        for (int i = 0; i < 20; ++i) {
            Vec2 z{m.z_domain.u1_lo +
                       (0.2 + 0.6 * rng.next_u01()) * (m.z_domain.u1_hi - m.z_domain.u1_lo),
                   m.z_domain.u2_lo +
                       (0.2 + 0.6 * rng.next_u01()) * (m.z_domain.u2_hi - m.z_domain.u2_lo)};
            Vec3 x = m.embed(z);
            auto enc = encode(m, grid, x);
            CHECK((m.embed(enc.z) - x).norm() < 1e-6 * (1 + x.norm()));
        }
    }
}

TEST_CASE("the origin maps to the channel origin for every mapping") {
    std::vector<MappingSystem> maps{
        helicoid_surface({.delta = kPi, .R = kPi}),
        rcasd30(),
        snasu_surface({.delta = 0.489, .alpha1 = 2.7486, .alpha2 = 2.0384}),
        bpam_linear({}),
    };
    for (const auto& m : maps) {
        EncodeGrid grid = build_encode_grid(m, 96);
        auto enc = encode(m, grid, Vec3::Zero());
        CHECK(m.embed(enc.z).norm() < 1e-9);
    }
}

TEST_CASE("projection lands in the brute-force basin") {
    auto m = rcasd30();
    EncodeGrid coarse = build_encode_grid(m, 96);
    EncodeGrid dense = build_encode_grid(m, 2048);
    Real step1 = (m.z_domain.u1_hi - m.z_domain.u1_lo) / 2048;
    Real step2 = (m.z_domain.u2_hi - m.z_domain.u2_lo) / 2048;
    SampleRng rng(5);
    for (int i = 0; i < 12; ++i) {
        Vec3 x = rng.gauss3(1.0);
        auto enc = encode(m, coarse, x);
        // dense argmin
        Real best = kInf;
        Vec2 zbest;
        for (size_t k = 0; k < dense.points.size(); ++k) {
            Real d2 = (dense.points[k] - x).squaredNorm();
            if (d2 < best) {
                best = d2;
                zbest = dense.zs[k];
            }
        }
        CHECK(std::abs(enc.z[0] - zbest[0]) < 2 * step1 + 1e-9);
        CHECK(std::abs(enc.z[1] - zbest[1]) < 2 * step2 + 1e-9);
        CHECK((x - m.embed(enc.z)).squaredNorm() <= best + 1e-12);
    }
}

TEST_CASE("decoding clamps out-of-domain channel points") {
    auto m = rcasd30();
    bool clamped = false;
    Vec2 outside{m.z_domain.u1_hi + 1.0, 0.0};
    Vec3 x = decode(m, outside, &clamped);
    CHECK(clamped);
    CHECK((x - m.embed({m.z_domain.u1_hi, 0.0})).norm() < 1e-12);
    decode(m, Vec2{0.0, 0.0}, &clamped);
    CHECK(!clamped);
}

TEST_CASE("helicoid decode point value") {
    auto m = helicoid_surface({.delta = kPi, .R = kPi});
    Vec3 x = decode(m, {1.0, kPi / 2});
    CHECK(x.isApprox(Vec3(0, 1, kPi / 2), 1e-12));
}

TEST_CASE("noiseless chain leaves only the fold-quantization error") {
    // small fold spacing: the error approaches the uniform bound delta^2/36
    MappingParams p{.delta = 0.2, .alpha1 = 16.0, .alpha2 = 2.0};
    auto m = rcasd_surface(p);
    EncodeGrid grid = build_encode_grid(m, 96);
    SampleRng rng(9);
    const int n = 20000;
    Real acc = 0;
    for (int i = 0; i < n; ++i) {
        Vec3 x = SampleRng(101, i).gauss3(1.0);
        auto enc = encode(m, grid, x);
        acc += (x - m.embed(enc.z)).squaredNorm();
    }
    Real measured = acc / n / 3.0;
    Real bound = uniform_approx_bound(p.delta);
    CHECK(measured / bound == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("linear baseline simulation matches its closed form") {
    SimConfig cfg;
    cfg.mapping = bpam_linear({});
    cfg.snr_db = 20.0;
    cfg.n_samples = 100000;
    cfg.seed = 42;
    SimResult r = run_simulation(cfg);
    Real closed = db_from_ratio(bpam_sdr(ratio_from_db(20.0), 3, 2));
    CHECK(std::abs(r.sdr_db - closed) < 0.2);
    CHECK(r.breakdown.eps_approx == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("simulation is reproducible and thread-count independent") {
    SimConfig cfg;
    cfg.mapping = rcasd30();
    cfg.snr_db = 30.0;
    cfg.n_samples = 5000;
    cfg.seed = 77;
    SimResult a = run_simulation(cfg);
    SimResult b = run_simulation(cfg);
    CHECK(a.sdr_db == b.sdr_db);
    CHECK(a.emp_power[0] == b.emp_power[0]);
    CHECK(a.anomaly_rate == b.anomaly_rate);

    setenv("SKGEOM_THREADS", "3", 1);
    SimResult c = run_simulation(cfg);
    unsetenv("SKGEOM_THREADS");
    CHECK(a.sdr_db == c.sdr_db);
    CHECK(a.emp_power[1] == c.emp_power[1]);
}

TEST_CASE("empirical channel power tracks the analytical model") {
    SimConfig cfg;
    cfg.mapping = rcasd30();
    cfg.snr_db = 30.0;
    cfg.n_samples = 50000;
    cfg.seed = 5;
    SimResult r = run_simulation(cfg);
    Real model = channel_model(cfg.mapping).total_power;
    Real emp = 0.5 * (r.emp_power[0] + r.emp_power[1]);
    CHECK(emp / model == doctest::Approx(1.0).epsilon(0.05));
    CHECK(!r.power_warn);
}

TEST_CASE("simulated channel-induced error matches the weak model at high snr") {
    MappingParams p{.delta = 0.1879, .alpha1 = 17.1555, .alpha2 = 3.5190};
    SimConfig cfg;
    cfg.mapping = rcasd_surface(p);
    cfg.snr_db = 50.0;
    cfg.n_samples = 60000;
    cfg.seed = 11;
    SimResult r = run_simulation(cfg);
    CHECK(r.anomaly_rate < 1e-4);
    // subtract the noiseless fold error measured separately
    EncodeGrid grid = build_encode_grid(cfg.mapping, 96);
    Real acc = 0;
    for (int i = 0; i < 20000; ++i) {
        Vec3 x = SampleRng(11, i).gauss3(1.0);
        auto enc = encode(cfg.mapping, grid, x);
        acc += (x - cfg.mapping.embed(enc.z)).squaredNorm();
    }
    Real eps_a_measured = acc / 20000 / 3.0;
    Real total = 1.0 / ratio_from_db(r.sdr_db);
    Real channel_part = total - eps_a_measured;
    CHECK(channel_part / r.breakdown.eps_ch_weak == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("anomaly rate does not grow as the channel cleans up") {
    MappingParams p{.delta = 0.60724, .alpha1 = 5.54332, .alpha2 = 2.04394};
    SimConfig cfg;
    cfg.mapping = rcasd_surface(p);
    cfg.n_samples = 30000;
    cfg.seed = 21;
    Real prev = kInf;
    for (Real snr_db : {30.0, 35.0, 40.0}) {
        cfg.snr_db = snr_db;
        SimResult r = run_simulation(cfg);
        Real sigma_binom =
            std::sqrt(std::max(prev, 1e-9) * (1 - std::min(prev, 1.0)) / cfg.n_samples);
        if (prev < kInf) CHECK(r.anomaly_rate <= prev + sigma_binom);
        prev = r.anomaly_rate;
    }
}

TEST_CASE("slope estimation") {
    SUBCASE("capacity-matching reference gives 2/3") {
        std::vector<std::pair<Real, Real>> pts;
        for (Real s = 20; s <= 50; s += 5)
            pts.push_back({s, db_from_ratio(opta_sdr(ratio_from_db(s), 3, 2))});
        CHECK(slope_estimate(pts) == doctest::Approx(2.0 / 3).epsilon(0.01));
    }
    SUBCASE("saturating baseline gives zero") {
        std::vector<std::pair<Real, Real>> pts;
        for (Real s = 25; s <= 55; s += 5)
            pts.push_back({s, db_from_ratio(bpam_sdr(ratio_from_db(s), 3, 2))});
        CHECK(std::abs(slope_estimate(pts)) < 0.05);
    }
    SUBCASE("span and count requirements") {
        std::vector<std::pair<Real, Real>> few{{30, 1}, {35, 2}, {40, 3}};
        CHECK_THROWS_AS(slope_estimate(few), std::invalid_argument);
        std::vector<std::pair<Real, Real>> narrow{{30, 1}, {32, 2}, {34, 3}, {36, 4}};
        CHECK_THROWS_AS(slope_estimate(narrow), std::invalid_argument);
    }
}

TEST_CASE("non-finite inputs are rejected") {
    auto m = rcasd30();
    EncodeGrid grid = build_encode_grid(m, 32);
    Vec3 bad{std::nan(""), 0, 0};
    CHECK_THROWS_AS(encode(m, grid, bad), std::domain_error);

    SimConfig cfg;
    cfg.mapping = m;
    cfg.n_samples = 10;
    CHECK_THROWS_AS(run_simulation(cfg), std::invalid_argument);
}
