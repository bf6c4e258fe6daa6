#include "skgeom/runner.hpp"

#include "skgeom/surface.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace skgeom {

std::vector<Real> snr_grid(const ExperimentConfig& cfg) {
    std::vector<Real> out;
    if (cfg.snr_step <= 0) throw std::invalid_argument("snr step must be positive");
    for (Real s = cfg.snr_start; s <= cfg.snr_stop + 1e-9; s += cfg.snr_step)
        out.push_back(s);
    return out;
}

namespace {

MappingParams with_experiment_fields(const ExperimentConfig& cfg, MappingParams p) {
    p.sigma_x = cfg.sigma_x;
    p.p_max = cfg.p_max;
    return p;
}

std::string extras_field(const MappingSystem& m) {
    std::ostringstream os;
    if (m.kind == MappingKind::Helicoid) os << "R=" << format_sig6(m.params.R) << ';';
    if (m.kind == MappingKind::Rcasd || m.kind == MappingKind::Snasu ||
        m.kind == MappingKind::Mscds)
        os << "alpha1_delta=" << format_sig6(m.params.alpha1 * m.params.delta) << ';';
    return os.str();
}

Real max_abs_kappa1(const MappingSystem& m, int grid) {
    ParametricSurface s = m.surface();
    Real worst = 0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            Vec2 u{s.domain.u1_lo + (s.domain.u1_hi - s.domain.u1_lo) * (i + 0.5) / grid,
                   s.domain.u2_lo + (s.domain.u2_hi - s.domain.u2_lo) * (j + 0.5) / grid};
            try {
                CurvatureReport c = principal_curvatures(fundamental_forms(s, u));
                worst = std::max(worst, std::abs(c.kappa1));
            } catch (const std::exception&) {
                // singular sample point (e.g. fold origin); skip
            }
        }
    }
    return worst;
}

} // namespace

int cmd_analyze(const std::string& mapping, const MappingParams& params, int grid,
                Real noise_radius, std::ostream& report,
                const std::optional<std::string>& grid_csv_path) {
    MappingSystem m;
    try {
        m = make_mapping(mapping, params);
    } catch (const std::exception& e) {
        report << "error: " << e.what() << "\n";
        return 64; // usage error
    }
    ParametricSurface s = m.surface();
    ClassificationReport cls = classify_surface(s, std::max(grid, 8));
    Real kmax = max_abs_kappa1(m, std::max(grid, 8));

    report << "mapping: " << m.name << "\n";
    report << "developable: " << (cls.developable ? "yes" : "no")
           << "  (max violation " << format_sig6(cls.max_violation_developable) << ")\n";
    report << "minimal: " << (cls.minimal ? "yes" : "no") << "  (max violation "
           << format_sig6(cls.max_violation_minimal) << ")\n";
    report << "curvature-line coordinates: " << (cls.coords_are_loc ? "yes" : "no")
           << "  (max violation " << format_sig6(cls.max_violation_loc) << ")\n";
    report << "geodesic coordinates: " << (cls.coords_are_geodesic ? "yes" : "no")
           << "  (max violation " << format_sig6(cls.max_violation_geodesic) << ")\n";
    report << "max |kappa1| over z-domain: " << format_sig6(kmax) << "\n";
    if (noise_radius > 0) {
        Real margin = (kmax > 0 ? 1.0 / kmax : kInf) - noise_radius;
        report << "canal margin vs noise radius " << format_sig6(noise_radius) << ": "
               << format_sig6(margin) << (margin > 0 ? " (safe)" : " (unsafe)") << "\n";
    }

    if (grid_csv_path) {
        // max |kappa1| as a function of (delta, alpha1) at fixed spiral angle
        std::ofstream f(*grid_csv_path, std::ios::binary);
        if (!f) {
            report << "error: cannot write " << *grid_csv_path << "\n";
            return 1;
        }
        f << "delta,alpha1,max_abs_kappa1\n";
        for (int i = 0; i < 24; ++i) {
            Real delta = 0.2 + (3.0 - 0.2) * i / 23.0;
            for (int j = 0; j < 24; ++j) {
                Real alpha1 = 0.5 + (10.0 - 0.5) * j / 23.0;
                MappingParams q = params;
                q.delta = delta;
                q.alpha1 = alpha1;
                q.alpha2 = 1.0;
                MappingSystem mq = make_mapping(mapping, q);
                ParametricSurface sq = mq.surface();
                Real z1 = 5.0;
                Real worst = 0;
                for (int t = 0; t < 16; ++t) {
                    Real z2 = sq.domain.u2_lo +
                              (sq.domain.u2_hi - sq.domain.u2_lo) * (t + 0.5) / 16;
                    try {
                        CurvatureReport c =
                            principal_curvatures(fundamental_forms(sq, {z1, z2}));
                        worst = std::max(worst, std::abs(c.kappa1));
                    } catch (const std::exception&) {
                    }
                }
                f << format_sig6(delta) << ',' << format_sig6(alpha1) << ','
                  << format_sig6(worst) << '\n';
            }
        }
    }
    return 0;
}

SweepRow sweep_point(const ExperimentConfig& cfg, Real snr_db,
                     const MappingParams* warm, MappingParams* out_params) {
    MappingKind kind = mapping_kind_from_string(cfg.mapping);
    MappingParams p = with_experiment_fields(cfg, cfg.params);

    OptResult opt;
    if (cfg.optimize_params && kind != MappingKind::Bpam) {
        OptProblem prob;
        prob.family = kind;
        prob.base = p;
        opt = optimize(prob, snr_db, warm);
        if (!opt.feasible) throw std::runtime_error("optimizer found no feasible point");
        p = opt.params;
    }
    if (out_params) *out_params = p;

    MappingSystem m = make_mapping(kind, p);
    SimConfig sc;
    sc.mapping = m;
    sc.snr_db = snr_db;
    sc.sigma_x = cfg.sigma_x;
    sc.n_samples = cfg.n_samples;
    sc.seed = cfg.seed;
    sc.p_max = cfg.p_max;
    sc.projection.grid_size = cfg.grid_size;
    SimResult sim = run_simulation(sc);

    Real snr = ratio_from_db(snr_db);
    SweepRow row;
    row.snr_db = snr_db;
    row.mapping = m.name;
    row.delta = p.delta;
    row.alpha1 = p.alpha1;
    row.alpha2 = p.alpha2;
    row.extras = extras_field(m);
    row.sdr_analytical_db =
        (kind == MappingKind::Bpam) ? db_from_ratio(bpam_sdr(snr, 3, 2))
                                    : analytic_sdr_db(m, snr_db);
    row.sdr_simulated_db = sim.sdr_db;
    row.opta_db = db_from_ratio(opta_sdr(snr, 3, 2));
    row.bpam_db = db_from_ratio(bpam_sdr(snr, 3, 2));
    row.anomaly_rate = sim.anomaly_rate;
    row.eps_approx = sim.breakdown.eps_approx;
    row.eps_ch_weak = sim.breakdown.eps_ch_weak;
    row.eps_ch_2nd = sim.breakdown.eps_ch_2nd;
    return row;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<Real> grid;
    try {
        grid = snr_grid(cfg);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 64;
    }
    std::vector<SweepRow> rows;
    int failures = 0;
    MappingParams warm_storage;
    const MappingParams* warm = nullptr;
    for (Real snr_db : grid) {
        try {
            rows.push_back(sweep_point(cfg, snr_db, warm, &warm_storage));
            warm = &warm_storage;
        } catch (const std::exception& e) {
            log << "point " << snr_db << " dB failed: " << e.what() << "\n";
            ++failures;
        }
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
        log << "error: cannot write " << cfg.out << "\n";
        return 1;
    }
    f << write_sweep_csv(rows);
    if (!f.good()) {
        log << "error: write failed for " << cfg.out << "\n";
        return 1;
    }
    return failures == 0 ? 0 : 2;
}

int cmd_baselines(int M, int N, const std::vector<Real>& snr_db,
                  const std::string& out_path, std::ostream& log) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        log << "error: cannot write " << out_path << "\n";
        return 1;
    }
    f << "snr_db,opta_db,bpam_db\n";
    for (Real s : snr_db) {
        Real snr = ratio_from_db(s);
        f << format_sig6(s) << ',' << format_sig6(db_from_ratio(opta_sdr(snr, M, N)))
          << ',' << format_sig6(db_from_ratio(bpam_sdr(snr, M, N))) << '\n';
    }
    return f.good() ? 0 : 1;
}

std::string describe(const SimResult& r) {
    std::ostringstream os;
    os << "sdr_db=" << format_sig6(r.sdr_db)
       << " power=(" << format_sig6(r.emp_power[0]) << ',' << format_sig6(r.emp_power[1])
       << ") anomaly_rate=" << format_sig6(r.anomaly_rate)
       << " eps_approx=" << format_sig6(r.breakdown.eps_approx)
       << " eps_ch_weak=" << format_sig6(r.breakdown.eps_ch_weak)
       << " eps_ch_2nd=" << format_sig6(r.breakdown.eps_ch_2nd);
    if (r.power_warn) os << " [power model mismatch > 5%]";
    return os.str();
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
    try {
        MappingParams p = with_experiment_fields(cfg, cfg.params);
        MappingSystem m = make_mapping(cfg.mapping, p);
        SimConfig sc;
        sc.mapping = m;
        sc.snr_db = cfg.snr_start;
        sc.sigma_x = cfg.sigma_x;
        sc.n_samples = cfg.n_samples;
        sc.seed = cfg.seed;
        sc.p_max = cfg.p_max;
        sc.projection.grid_size = cfg.grid_size;
        SimResult r = run_simulation(sc);
        log << m.name << " @ " << format_sig6(cfg.snr_start) << " dB: " << describe(r)
            << "\n";
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 64;
    }
}

int cmd_optimize(const ExperimentConfig& cfg, std::ostream& log) {
    try {
        OptProblem prob;
        prob.family = mapping_kind_from_string(cfg.mapping);
        prob.base = with_experiment_fields(cfg, cfg.params);
        OptResult r = optimize(prob, cfg.snr_start);
        if (!r.feasible) {
            log << "infeasible: no start satisfied the power budget\n";
            return 2;
        }
        log << cfg.mapping << " @ " << format_sig6(cfg.snr_start)
            << " dB: delta=" << format_sig6(r.params.delta)
            << " alpha1=" << format_sig6(r.params.alpha1)
            << " alpha2=" << format_sig6(r.params.alpha2)
            << " alpha1*delta=" << format_sig6(r.params.alpha1 * r.params.delta)
            << " D=" << format_sig6(r.d_total)
            << " lambda=" << format_sig6(r.lambda)
            << " kkt_residual=" << format_sig6(r.kkt_residual)
            << (r.active_constraint ? " (power-limited)" : "") << "\n";
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 64;
    }
}

} // namespace skgeom
