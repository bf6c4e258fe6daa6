#include "skgeom/optimize.hpp"

#include <doctest.h>

using namespace skgeom;

TEST_CASE("simplex minimizer on a shifted quadratic") {
    auto f = [](const std::vector<Real>& x) {
        Real a = x[0] - 1.5, b = x[1] + 0.25;
        return a * a + 4 * b * b + 3.0;
    };
    auto x = nelder_mead(f, {0.0, 0.0});
    CHECK(x[0] == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(x[1] == doctest::Approx(-0.25).epsilon(1e-6));
}

TEST_CASE("spiral cylinder optimum reproduces the boundary-elimination chain") {
    OptProblem pr;
    pr.family = MappingKind::Rcasd;
    OptResult r = optimize(pr, 30.0);
    REQUIRE(r.feasible);
    REQUIRE(r.active_constraint);

    // oracle: bisected quartic for delta, then alpha2, then alpha1 by
    // eliminating the power budget
    Real snr = ratio_from_db(30.0);
    Real delta_o = rcasd_delta_exact(snr);
    Real alpha2_o = rcasd_kkt_alpha2(delta_o);
    Real alpha1_o = std::sqrt(rcasd_boundary_alpha1_sq(delta_o, alpha2_o));

    CHECK(r.params.delta == doctest::Approx(delta_o).epsilon(0.01));
    CHECK(r.params.alpha2 == doctest::Approx(alpha2_o).epsilon(0.01));
    CHECK(r.params.alpha1 == doctest::Approx(alpha1_o).epsilon(0.01));

    // the elimination also holds at the reported optimum itself
    Real a1_from_boundary =
        std::sqrt(rcasd_boundary_alpha1_sq(r.params.delta, r.params.alpha2));
    CHECK(r.params.alpha1 == doctest::Approx(a1_from_boundary).epsilon(0.01));
}

TEST_CASE("every reported optimum satisfies the first-order conditions") {
    for (auto family : {MappingKind::Rcasd, MappingKind::Snasu, MappingKind::Helicoid}) {
        OptProblem pr;
        pr.family = family;
        OptResult r = optimize(pr, 30.0);
        REQUIRE(r.feasible);
        CHECK(r.lambda >= 0.0);
        CHECK(r.kkt_residual < 1e-5);
        Real power = channel_power_model(family, r.params);
        CHECK(power <= pr.base.p_max * (1 + 1e-6));
        CHECK(std::abs(r.lambda * (pr.base.p_max - power)) < 1e-6);
    }
}

TEST_CASE("local optimality on the power boundary") {
    OptProblem pr;
    pr.family = MappingKind::Snasu;
    OptResult r = optimize(pr, 30.0);
    REQUIRE(r.feasible);
    Real snr = ratio_from_db(30.0);
    Real d0 = total_distortion_model(pr.family, r.params, snr);

    // perturb along the boundary: move (delta, alpha1), re-solve alpha2 from
    // the budget, and require no improvement
    auto on_boundary = [&](Real delta, Real alpha1) -> Real {
        MappingParams p = r.params;
        p.delta = delta;
        p.alpha1 = alpha1;
        Real lo = 0.1, hi = 100.0;
        for (int i = 0; i < 200; ++i) {
            p.alpha2 = 0.5 * (lo + hi);
            (channel_power_model(pr.family, p) > pr.base.p_max ? lo : hi) = p.alpha2;
        }
        p.alpha2 = hi;
        return total_distortion_model(pr.family, p, snr);
    };
    for (Real fd : {0.99, 1.01}) {
        for (Real fa : {0.99, 1.01}) {
            CHECK(on_boundary(r.params.delta * fd, r.params.alpha1 * fa) >= d0 - 1e-9);
        }
    }
}

TEST_CASE("snail optimum against the cross-implementation regression values") {
    OptProblem pr;
    pr.family = MappingKind::Snasu;
    OptResult r = optimize(pr, 30.0);
    REQUIRE(r.feasible);
    // frozen from an independent SLSQP/Nelder-Mead implementation of the
    // same closed-form model
    CHECK(r.params.delta == doctest::Approx(0.4891).epsilon(0.02));
    CHECK(r.params.alpha1 == doctest::Approx(2.7486).epsilon(0.02));
    CHECK(r.params.alpha2 == doctest::Approx(2.0384).epsilon(0.02));
}

TEST_CASE("sweep behaviour") {
    OptProblem pr;
    pr.family = MappingKind::Rcasd;
    SUBCASE("fold spacing shrinks with snr like the quartic-root law") {
        std::vector<Real> grid{20, 25, 30, 35, 40, 45, 50};
        auto pts = sweep(pr, grid);
        REQUIRE(pts.size() == grid.size());
        Real prev = kInf;
        for (const auto& pt : pts) {
            REQUIRE(pt.ok);
            CHECK(pt.opt.params.delta < prev);
            prev = pt.opt.params.delta;
        }
        // trend oracle: delta ~ snr^(-1/4)
        Real ratio = pts.back().opt.params.delta / pts.front().opt.params.delta;
        Real oracle = rcasd_high_snr_delta(ratio_from_db(50)) /
                      rcasd_high_snr_delta(ratio_from_db(20));
        CHECK(ratio == doctest::Approx(oracle).epsilon(0.1));
    }
    SUBCASE("warm start never loses to the cold start") {
        auto pts = sweep(pr, {28, 30});
        OptResult cold = optimize(pr, 30.0);
        CHECK(pts[1].opt.d_total <= cold.d_total + 1e-8);
    }
    SUBCASE("single-point grid") {
        auto pts = sweep(pr, {30});
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].ok);
    }
}

TEST_CASE("infeasible budgets are reported, not fudged") {
    OptProblem pr;
    pr.family = MappingKind::Rcasd;
    pr.base.p_max = 1e-6; // cannot fit even the smallest allowed amplification
    OptResult r = optimize(pr, 30.0);
    CHECK(!r.feasible);

    auto pts = sweep(pr, {30, 35});
    CHECK(!pts[0].ok);
    CHECK(!pts[1].ok);
    CHECK(!pts[0].error.empty());
}

TEST_CASE("distortion equipartition holds near the optimum at high snr") {
    for (auto family : {MappingKind::Rcasd, MappingKind::Snasu}) {
        OptProblem pr;
        pr.family = family;
        OptResult r = optimize(pr, 40.0);
        REQUIRE(r.feasible);
        MappingSystem m = make_mapping(family, r.params);
        Real eps_a = approximation_distortion(m);
        Real eps_ch = weak_channel_distortion_closed(m, std::sqrt(1e-4));
        Real ratio = eps_a / eps_ch;
        CHECK(ratio > 0.2);
        CHECK(ratio < 5.0);
    }
}
