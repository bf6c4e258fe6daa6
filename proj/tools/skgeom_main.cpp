// Command-line front end: geometry reports, per-SNR optimization,
// Monte-Carlo runs, sweeps and baseline curves. See README for usage.

#include "skgeom/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct SnrRange {
    double start = 10, stop = 45, step = 5;
};

// "a:b:step" or a single value
SnrRange parse_snr(const std::string& text) {
    SnrRange r;
    auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        r.start = r.stop = std::stod(text);
        r.step = 1;
        return r;
    }
    auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw CLI::ValidationError("--snr expects a:b:step");
    r.start = std::stod(text.substr(0, c1));
    r.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    r.step = std::stod(text.substr(c2 + 1));
    return r;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analog dimension-changing mappings: geometry analysis, "
                 "optimization and AWGN Monte-Carlo"};
    app.set_config("--config", "", "declarative experiment config file");
    app.require_subcommand(1);

    std::string mapping;
    std::string snr_text = "10:45:5";
    std::string out_path;
    skgeom::ExperimentConfig cfg;
    double delta = 0, alpha1 = 0, alpha2 = 0;
    double helicoid_R = skgeom::kPi;
    double noise_radius = 0;
    int grid = 16;
    int M = 3, N = 2;

    auto add_common = [&](CLI::App* sub, bool need_mapping) {
        if (need_mapping)
            sub->add_option("--mapping", mapping, "helicoid|rcasd|mscds|snasu|bpam")
                ->required();
        sub->add_option("--snr", snr_text, "SNR grid a:b:step in dB, or one value");
        sub->add_option("--samples", cfg.n_samples, "Monte-Carlo samples per point");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--sigma-x", cfg.sigma_x, "source std dev");
        sub->add_option("--p-max", cfg.p_max, "power budget per channel dimension");
        sub->add_option("--grid-size", cfg.grid_size, "encoder search grid per axis");
        sub->add_option("--delta", delta, "fold spacing (skips optimization)");
        sub->add_option("--alpha1", alpha1, "channel-1 amplification");
        sub->add_option("--alpha2", alpha2, "channel-2 amplification");
        sub->add_option("--R", helicoid_R, "helicoid radius parameter");
        sub->add_option("--out", out_path, "output CSV path");
    };

    auto* analyze = app.add_subcommand("analyze", "geometry report for a mapping");
    add_common(analyze, true);
    analyze->add_option("--analysis-grid", grid, "sampling grid per axis");
    analyze->add_option("--noise-radius", noise_radius, "tube radius for the canal margin");

    auto* optimize = app.add_subcommand("optimize", "optimize parameters at one SNR");
    add_common(optimize, true);

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo run at one SNR");
    add_common(simulate, true);

    auto* sweep = app.add_subcommand("sweep", "optimize + simulate over an SNR grid");
    add_common(sweep, true);

    auto* baselines = app.add_subcommand("baselines", "OPTA and BPAM curves");
    add_common(baselines, false);
    baselines->add_option("--source-dim", M, "source dimension");
    baselines->add_option("--channel-dim", N, "channel dimension");

    CLI11_PARSE(app, argc, argv);

    try {
        SnrRange r = parse_snr(snr_text);
        cfg.snr_start = r.start;
        cfg.snr_stop = r.stop;
        cfg.snr_step = r.step;
        cfg.mapping = mapping;
        if (delta > 0) {
            cfg.optimize_params = false;
            cfg.params.delta = delta;
            if (alpha1 > 0) cfg.params.alpha1 = alpha1;
            if (alpha2 > 0) cfg.params.alpha2 = alpha2;
        }
        cfg.params.R = helicoid_R;
        if (!out_path.empty()) cfg.out = out_path;

        if (*analyze) {
            std::optional<std::string> grid_csv;
            if (!out_path.empty()) grid_csv = out_path;
            return skgeom::cmd_analyze(mapping, cfg.params, grid, noise_radius,
                                       std::cout, grid_csv);
        }
        if (*optimize) return skgeom::cmd_optimize(cfg, std::cout);
        if (*simulate) return skgeom::cmd_simulate(cfg, std::cout);
        if (*sweep) return skgeom::cmd_sweep(cfg, std::cout);
        if (*baselines) {
            std::vector<skgeom::Real> grid_db;
            for (double s = r.start; s <= r.stop + 1e-9; s += r.step)
                grid_db.push_back(s);
            return skgeom::cmd_baselines(M, N, grid_db,
                                         out_path.empty() ? "baselines.csv" : out_path,
                                         std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    }
    return 0;
}
