#include "skgeom/curve.hpp"
#include "skgeom/rng.hpp"

#include <doctest.h>

using namespace skgeom;

namespace {

ParametricCurve helix(Real R, Real h, Real lo = -4 * kPi, Real hi = 4 * kPi) {
    auto ev = [=](Real x) {
        VecX v(3);
        v << R * std::cos(x), R * std::sin(x), h * x;
        return v;
    };
    auto d1 = [=](Real x) {
        VecX v(3);
        v << -R * std::sin(x), R * std::cos(x), h;
        return v;
    };
    auto d2 = [=](Real x) {
        VecX v(3);
        v << -R * std::cos(x), -R * std::sin(x), 0.0;
        return v;
    };
    auto d3 = [=](Real x) {
        VecX v(3);
        v << R * std::sin(x), -R * std::cos(x), 0.0;
        return v;
    };
    return make_curve(3, lo, hi, ev, d1, d2, d3);
}

// closed-form helix invariants used as oracles
Real helix_kappa(Real R, Real h) { return R / (R * R + h * h); }
Real helix_tau(Real R, Real h) { return h / (R * R + h * h); }

ParametricCurve circle(Real R, Real lo = 0, Real hi = 2 * kPi) {
    auto ev = [=](Real x) {
        VecX v(3);
        v << R * std::cos(x), R * std::sin(x), 0.0;
        return v;
    };
    return make_curve(3, lo, hi, ev);
}

ParametricCurve line3(Vec3 a, Vec3 b, Real lo = 0, Real hi = 1) {
    auto ev = [=](Real x) { return VecX(a + x * b); };
    return make_curve(3, lo, hi, ev);
}

// smooth curve with randomized trigonometric coefficients
ParametricCurve random_curve(SampleRng& rng) {
    Eigen::Matrix3d A, B;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            A(i, j) = rng.next_gauss();
            B(i, j) = rng.next_gauss();
        }
    auto ev = [=](Real x) {
        Vec3 w{std::sin(x), std::sin(2 * x + 0.3), std::cos(0.5 * x)};
        Vec3 v{std::cos(1.3 * x), std::sin(0.7 * x), x};
        return VecX(A * w + B * v);
    };
    return make_curve(3, -2.0, 2.0, ev);
}

} // namespace

TEST_CASE("arc length: line, circle, helix") {
    CHECK(arc_length(line3({0, 0, 0}, {1, 0, 0}), 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(arc_length(circle(2.0), 0, 2 * kPi) == doctest::Approx(4 * kPi).epsilon(1e-10));

    // dense Riemann oracle for the unit helix over [0,1]
    auto h = helix(1, 1);
    const int n = 1000000;
    Real riemann = 0;
    for (int i = 0; i < n; ++i) {
        Real x = (i + 0.5) / n;
        riemann += h.d1(x).norm() / n;
    }
    Real quad = arc_length(h, 0, 1);
    CHECK(quad == doctest::Approx(riemann).epsilon(1e-9));
    CHECK(quad == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("arc length is additive over subintervals") {
    auto h = helix(1.5, 0.3);
    Real full = arc_length(h, -1.0, 2.0);
    Real split = arc_length(h, -1.0, 0.4) + arc_length(h, 0.4, 2.0);
    CHECK(full == doctest::Approx(split).epsilon(1e-8));
}

TEST_CASE("arc length rejects non-finite derivatives") {
    auto bad = make_curve(3, -1.0, 1.0, [](Real x) {
        VecX v(3);
        v << std::sqrt(x), 0.0, 0.0;
        return v;
    });
    CHECK_THROWS_AS(arc_length(bad, -1.0, 1.0), std::domain_error);
}

TEST_CASE("reparametrization by arc length") {
    SUBCASE("already unit speed stays put") {
        auto c = line3({0, 0, 0}, {1, 0, 0});
        auto y = reparametrize_by_arc_length(c);
        CHECK(Vec3(y.eval(0.5)).isApprox(Vec3(0.5, 0, 0), 1e-10));
    }
    SUBCASE("constant speed rescale") {
        auto c = line3({0, 0, 0}, {2, 0, 0});
        auto y = reparametrize_by_arc_length(c);
        CHECK(y.x_hi == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(y.eval(1.3)[0] == doctest::Approx(1.3).epsilon(1e-9));
    }
    SUBCASE("quadratic curve gains unit speed") {
        auto c = make_curve(3, 1.0, 2.0, [](Real x) {
            VecX v(3);
            v << x * x, 0.0, 0.0;
            return v;
        });
        auto y = reparametrize_by_arc_length(c);
        CHECK(y.x_hi == doctest::Approx(3.0).epsilon(1e-9)); // l = x^2 - 1 runs to 3
        for (int i = 1; i < 100; ++i) {
            Real l = y.x_hi * i / 100.0;
            CHECK(y.d1(l).norm() == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    SUBCASE("vanishing speed is rejected") {
        auto c = make_curve(3, -1.0, 1.0, [](Real x) {
            VecX v(3);
            v << x * x * x, 0.0, 0.0;
            return v;
        });
        CHECK_THROWS_AS(reparametrize_by_arc_length(c), std::domain_error);
    }
}

TEST_CASE("unit speed holds at 1000 points of a generic curve") {
    SampleRng rng(11);
    auto c = random_curve(rng);
    auto y = reparametrize_by_arc_length(c);
    for (int i = 1; i < 1000; ++i) {
        Real l = y.x_hi * i / 1000.0;
        CHECK(y.d1(l).norm() == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK((y.eval(0) - c.eval(c.x_lo)).norm() < 1e-9);
    CHECK((y.eval(y.x_hi) - c.eval(c.x_hi)).norm() < 1e-7);
}

TEST_CASE("frenet frame: circle, line, helix") {
    SUBCASE("circle of radius 2 is a plane curve with kappa = 1/2") {
        auto f = frenet(circle(2.0), 0.7);
        CHECK(f.kappa == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(std::abs(f.tau) < 1e-8);
    }
    SUBCASE("straight line degenerates") {
        auto f = frenet(line3({1, 2, 3}, {0, 1, 1}), 0.5);
        CHECK(f.kappa < 1e-12);
        CHECK(f.degenerate);
    }
    SUBCASE("unit helix: kappa = tau = 1/2") {
        auto f = frenet(helix(1, 1), 0.3);
        CHECK(f.kappa == doctest::Approx(helix_kappa(1, 1)).epsilon(1e-9));
        CHECK(f.tau == doctest::Approx(helix_tau(1, 1)).epsilon(1e-9));
    }
    SUBCASE("helix family against the closed form") {
        for (auto [R, h] : {std::pair{2.0, 0.5}, {0.7, 1.3}, {1.0, 0.25}}) {
            auto f = frenet(helix(R, h), -1.1);
            CHECK(f.kappa == doctest::Approx(helix_kappa(R, h)).epsilon(1e-8));
            CHECK(f.tau == doctest::Approx(helix_tau(R, h)).epsilon(1e-8));
        }
    }
}

TEST_CASE("frenet frames are orthonormal on random curves") {
    SampleRng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        auto c = random_curve(rng);
        for (Real x : {-1.5, -0.4, 0.2, 1.1, 1.9}) {
            auto f = frenet(c, x);
            if (f.degenerate) continue;
            CHECK(std::abs(f.t.norm() - 1) < 1e-9);
            CHECK(std::abs(f.p.norm() - 1) < 1e-9);
            CHECK(std::abs(f.b.norm() - 1) < 1e-9);
            CHECK(std::abs(f.t.dot(f.p)) < 1e-8);
            CHECK(std::abs(f.t.dot(f.b)) < 1e-8);
            CHECK(std::abs(f.p.dot(f.b)) < 1e-8);
            CHECK((f.b - f.t.cross(f.p)).norm() < 1e-9);
        }
    }
}

TEST_CASE("frame derivative relations under arc-length parametrization") {
    SampleRng rng(5);
    auto y = reparametrize_by_arc_length(random_curve(rng));
    Real h = 1e-5;
    for (Real frac : {0.3, 0.5, 0.7}) {
        Real l = frac * y.x_hi;
        auto fp = frenet(y, l + h);
        auto fm = frenet(y, l - h);
        auto f0 = frenet(y, l);
        REQUIRE(!f0.degenerate);
        Vec3 td = (fp.t - fm.t) / (2 * h);
        Vec3 pd = (fp.p - fm.p) / (2 * h);
        Vec3 bd = (fp.b - fm.b) / (2 * h);
        CHECK((td - f0.kappa * f0.p).norm() < 1e-4);
        CHECK((pd + f0.kappa * f0.t - f0.tau * f0.b).norm() < 1e-4);
        CHECK((bd + f0.tau * f0.p).norm() < 1e-4);
    }
}

TEST_CASE("curvature is invariant under reparametrization") {
    SampleRng rng(33);
    auto c = random_curve(rng);
    auto y = reparametrize_by_arc_length(c);
    for (Real x : {-1.2, 0.1, 0.9, 1.7}) {
        Real k_orig = curvature(c, x);
        Real l = arc_length(c, c.x_lo, x);
        Real k_arc = y.d2(l).norm(); // unit-speed curvature is |y''|
        CHECK(k_arc == doctest::Approx(k_orig).epsilon(1e-5));
    }
}

TEST_CASE("analytic derivatives match finite differences") {
    auto h = helix(1.3, 0.6);
    auto base = h.eval;
    for (Real x : {-2.0, -0.5, 0.4, 1.8}) {
        CHECK((h.d1(x) - fd::d1(base, x)).norm() / h.d1(x).norm() < 1e-5);
        CHECK((h.d2(x) - fd::d2(base, x)).norm() / h.d2(x).norm() < 1e-5);
        CHECK((h.d3(x) - fd::d3(base, x)).norm() / h.d3(x).norm() < 1e-4);
    }
}

TEST_CASE("canonical local form") {
    CHECK(canonical_form(0, 7.0, 0.3) == Vec3(0.3, 0, 0));
    CHECK(canonical_form(1, 0, 0.2) == Vec3(0.2, 0.02, 0));

    // helix expressed in its own frame agrees to third order
    auto h = helix(1, 1);
    auto f = frenet(h, 0);
    Vec3 p0 = h.eval(0);
    Real ell = 0.05;
    Real x = ell / std::sqrt(2.0); // unit-helix arc length is sqrt(2) x
    Vec3 dp = Vec3(h.eval(x)) - p0;
    Vec3 local{dp.dot(f.t), dp.dot(f.p), dp.dot(f.b)};
    Vec3 canon = canonical_form(f.kappa, f.tau, ell);
    CHECK((local - canon).norm() < 2.0 * ell * ell * ell);
}

TEST_CASE("osculating sphere") {
    SUBCASE("circle: the sphere is the circle itself") {
        auto s = osculating_sphere(circle(3.0), 1.1);
        CHECK(s.radius == doctest::Approx(3.0).epsilon(1e-7));
        CHECK(s.center.norm() < 1e-6);
        CHECK(s.circle_fallback);
    }
    SUBCASE("unit helix: constant curvature, radius rho = 2") {
        auto s = osculating_sphere(helix(1, 1), 0.4);
        CHECK(s.radius == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(!s.circle_fallback);
    }
    SUBCASE("generic cubic: sphere radius at least rho") {
        auto c = make_curve(3, -1.0, 1.0, [](Real x) {
            VecX v(3);
            v << x, x * x, x * x * x;
            return v;
        });
        auto s = osculating_sphere(c, 0.3);
        Real rho = 1.0 / curvature(c, 0.3);
        CHECK(s.radius >= rho - 1e-9);
    }
}

TEST_CASE("canal surface test") {
    SUBCASE("straight spine is always safe") {
        CanalSurfaceSpec spec{line3({0, 0, 0}, {1, 1, 0}, 0, 10), 5.0};
        auto r = canal_self_intersection_test(spec, 64);
        CHECK(r.safe);
        CHECK(r.worst_margin == kInf);
    }
    SUBCASE("circle spine, tube too fat") {
        CanalSurfaceSpec spec{circle(1.0), 1.5};
        CHECK(!canal_self_intersection_test(spec, 128).safe);
    }
    SUBCASE("circle spine, thin tube") {
        CanalSurfaceSpec spec{circle(1.0), 0.5};
        auto r = canal_self_intersection_test(spec, 128);
        CHECK(r.safe);
        CHECK(r.worst_margin == doctest::Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("transition sits at the spine radius of curvature") {
        auto flip = [&](Real r) {
            CanalSurfaceSpec spec{circle(1.0), r};
            return canal_self_intersection_test(spec, 64).safe;
        };
        Real lo = 0.5, hi = 1.5;
        REQUIRE(flip(lo));
        REQUIRE(!flip(hi));
        while (hi - lo > 1e-7) {
            Real mid = 0.5 * (lo + hi);
            (flip(mid) ? lo : hi) = mid;
        }
        CHECK(0.5 * (lo + hi) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("noise tube radius") {
    CHECK(noise_tube_radius(1.0, 2, 4.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(noise_tube_radius(0.0, 2, 4.0) == 0.0);
    CHECK(noise_tube_radius(0.1, 3, 4.0) ==
          doctest::Approx(std::sqrt(8.0 / 300.0)).epsilon(1e-15));
    CHECK_THROWS_AS(noise_tube_radius(1.0, 1, 4.0), std::invalid_argument);
}
