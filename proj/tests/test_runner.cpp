#include "skgeom/runner.hpp"
#include "skgeom/surface.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace skgeom;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/skgeom_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("csv formatting and round trip") {
    std::vector<SweepRow> rows(2);
    rows[0].snr_db = 30;
    rows[0].mapping = "rcasd";
    rows[0].delta = 0.607239;
    rows[0].alpha1 = 5.543317;
    rows[0].alpha2 = 2.043941;
    rows[0].extras = "alpha1_delta=3.36613;";
    rows[0].sdr_analytical_db = 16.5995;
    rows[0].sdr_simulated_db = 16.4933;
    rows[0].opta_db = 20.0029;
    rows[0].bpam_db = 4.76252;
    rows[0].anomaly_rate = 0.00027;
    rows[0].eps_approx = 0.0102428;
    rows[0].eps_ch_weak = 0.0116354;
    rows[0].eps_ch_2nd = 4.74e-07;
    rows[1] = rows[0];
    rows[1].snr_db = 35;
    rows[1].mapping = "snasu";

    std::string text = write_sweep_csv(rows);
    SUBCASE("header and line endings") {
        CHECK(text.rfind(sweep_csv_header(), 0) == 0);
        CHECK(text.find("\r") == std::string::npos);
        CHECK(text.back() == '\n');
    }
    SUBCASE("parse-write is the identity on the emitted text") {
        auto parsed = parse_sweep_csv(text);
        REQUIRE(parsed.size() == 2);
        CHECK(write_sweep_csv(parsed) == text);
        CHECK(parsed[0].mapping == "rcasd");
        CHECK(parsed[1].snr_db == 35.0);
    }
    SUBCASE("six significant digits") {
        CHECK(format_sig6(0.607239123) == "0.607239");
        CHECK(format_sig6(1234567.0) == "1.23457e+06");
        CHECK(format_sig6(0.0) == "0");
    }
    SUBCASE("bad header rejected") {
        CHECK_THROWS_AS(parse_sweep_csv("x,y\n1,2\n"), std::runtime_error);
    }
}

TEST_CASE("baseline curves") {
    TempFile tmp("baselines.csv");
    std::ostringstream log;
    int rc = cmd_baselines(3, 2, {0.0, 30.0, 60.0}, tmp.path, log);
    CHECK(rc == 0);
    std::string text = slurp(tmp.path);
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    CHECK(line == "snr_db,opta_db,bpam_db");
    std::getline(is, line);
    auto f0 = split_csv_line(line);
    CHECK(std::stod(f0[1]) == doctest::Approx(10 * 2.0 / 3 * std::log10(2.0)).epsilon(1e-4));
    std::getline(is, line);
    auto f30 = split_csv_line(line);
    CHECK(std::stod(f30[1]) == doctest::Approx(20.0029).epsilon(1e-3));
    std::getline(is, line);
    auto f60 = split_csv_line(line);
    CHECK(std::stod(f60[2]) == doctest::Approx(4.7712).epsilon(1e-3)); // plateau
}

TEST_CASE("analyze reports") {
    SUBCASE("plane baseline has an all-zero curvature report") {
        std::ostringstream rep;
        int rc = cmd_analyze("bpam", {}, 16, 0.0, rep, std::nullopt);
        CHECK(rc == 0);
        CHECK(rep.str().find("developable: yes") != std::string::npos);
        CHECK(rep.str().find("minimal: yes") != std::string::npos);
        CHECK(rep.str().find("max |kappa1| over z-domain: 0") != std::string::npos);
    }
    SUBCASE("invalid parameters produce a usage error") {
        std::ostringstream rep;
        MappingParams bad;
        bad.delta = -2;
        CHECK(cmd_analyze("rcasd", bad, 16, 0.0, rep, std::nullopt) == 64);
        CHECK(cmd_analyze("noway", {}, 16, 0.0, rep, std::nullopt) == 64);
    }
    SUBCASE("curvature stays moderate at the 30 dB operating point") {
        // mean |kappa1| below one over the likely channel range
        MappingParams p{.delta = 0.60724, .alpha1 = 5.54332, .alpha2 = 2.04394};
        auto m = rcasd_surface(p);
        auto cm = channel_model(m);
        auto s = m.surface();
        Real acc = 0;
        int n = 0;
        SampleRng rng(31);
        for (int i = 0; i < 4000; ++i) {
            Real z1 = cm.ch[0].sample(rng);
            if (std::abs(z1) < 2 * p.eta * p.delta / p.alpha1) continue;
            auto c = principal_curvatures(fundamental_forms(s, {z1, 0.1}));
            acc += std::abs(c.kappa1);
            ++n;
        }
        CHECK(acc / n < 1.0);
    }
    SUBCASE("snail bends harder than the spiral cylinder at equal parameters") {
        MappingParams p{.delta = 0.6, .alpha1 = 3.0, .alpha2 = 1.0};
        auto max_k = [&](const MappingSystem& m) {
            auto s = m.surface();
            Real worst = 0;
            for (int t = 0; t < 32; ++t) {
                Real z2 = s.domain.u2_lo +
                          (s.domain.u2_hi - s.domain.u2_lo) * (t + 0.5) / 32;
                Real z1 = p.eta * p.delta * 25.0 / p.alpha1; // spiral angle u = 5
                auto c = principal_curvatures(fundamental_forms(s, {z1, z2}));
                worst = std::max(worst, std::abs(c.kappa1));
            }
            return worst;
        };
        CHECK(max_k(snasu_surface(p)) >= max_k(rcasd_surface(p)) - 1e-9);
    }
    SUBCASE("curvature grid csv is written") {
        TempFile tmp("kgrid.csv");
        std::ostringstream rep;
        MappingParams p{.delta = 0.6, .alpha1 = 3.0, .alpha2 = 1.0};
        CHECK(cmd_analyze("rcasd", p, 8, 0.1, rep, tmp.path) == 0);
        std::string text = slurp(tmp.path);
        CHECK(text.rfind("delta,alpha1,max_abs_kappa1\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 24 * 24);
    }
}

TEST_CASE("sweep command produces deterministic, parseable output") {
    ExperimentConfig cfg;
    cfg.mapping = "bpam";
    cfg.optimize_params = false;
    cfg.snr_start = 20;
    cfg.snr_stop = 25;
    cfg.snr_step = 5;
    cfg.n_samples = 2000;
    cfg.seed = 9;
    TempFile out1("sweep1.csv"), out2("sweep2.csv");
    std::ostringstream log;

    cfg.out = out1.path;
    REQUIRE(cmd_sweep(cfg, log) == 0);
    cfg.out = out2.path;
    REQUIRE(cmd_sweep(cfg, log) == 0);

    std::string a = slurp(out1.path), b = slurp(out2.path);
    CHECK(a == b);
    auto rows = parse_sweep_csv(a);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].snr_db == 20.0);
    CHECK(rows[1].snr_db == 25.0);
    CHECK(rows[0].mapping == "bpam");
    CHECK(std::abs(rows[0].sdr_simulated_db - rows[0].bpam_db) < 0.3);
}

TEST_CASE("empty snr grid produces a bare header") {
    ExperimentConfig cfg;
    cfg.mapping = "bpam";
    cfg.optimize_params = false;
    cfg.snr_start = 30;
    cfg.snr_stop = 20; // empty
    cfg.snr_step = 5;
    TempFile out("empty.csv");
    cfg.out = out.path;
    std::ostringstream log;
    CHECK(cmd_sweep(cfg, log) == 0);
    CHECK(slurp(out.path) == std::string(sweep_csv_header()) + "\n");
}

TEST_CASE("unwritable output path fails with an i/o error") {
    ExperimentConfig cfg;
    cfg.mapping = "bpam";
    cfg.optimize_params = false;
    cfg.snr_start = cfg.snr_stop = 20;
    cfg.n_samples = 2000;
    cfg.out = "/nonexistent_dir/sweep.csv";
    std::ostringstream log;
    CHECK(cmd_sweep(cfg, log) == 1);
}

TEST_CASE("cli binary end to end") {
    const char* cli = SKGEOM_CLI_PATH;
    TempFile out("cli_sweep.csv");
    std::string cmd = std::string(cli) +
                      " sweep --mapping bpam --delta 1 --snr 20:25:5 --samples 2000"
                      " --seed 4 --out " + out.path + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    CHECK(rc == 0);
    auto rows = parse_sweep_csv(slurp(out.path));
    CHECK(rows.size() == 2);

    std::string bad = std::string(cli) + " sweep --mapping nope --out /tmp/x.csv > /dev/null 2>&1";
    CHECK(std::system(bad.c_str()) != 0);
}
