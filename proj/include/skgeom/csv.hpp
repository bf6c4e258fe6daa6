#pragma once

#include "skgeom/common.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

namespace skgeom {

/// Fixed 6-significant-digit decimal formatting used by every CSV emitter.
inline std::string format_sig6(Real v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct SweepRow {
    Real snr_db = 0;
    std::string mapping;
    Real delta = 0, alpha1 = 0, alpha2 = 0;
    std::string extras;
    Real sdr_analytical_db = 0, sdr_simulated_db = 0;
    Real opta_db = 0, bpam_db = 0;
    Real anomaly_rate = 0;
    Real eps_approx = 0, eps_ch_weak = 0, eps_ch_2nd = 0;
};

inline const char* sweep_csv_header() {
    return "snr_db,mapping,delta,alpha1,alpha2,extras,sdr_analytical_db,"
           "sdr_simulated_db,opta_db,bpam_db,anomaly_rate,eps_approx,"
           "eps_ch_weak,eps_ch_2nd";
}

inline std::string to_csv_line(const SweepRow& r) {
    std::ostringstream os;
    os << format_sig6(r.snr_db) << ',' << r.mapping << ',' << format_sig6(r.delta)
       << ',' << format_sig6(r.alpha1) << ',' << format_sig6(r.alpha2) << ','
       << r.extras << ',' << format_sig6(r.sdr_analytical_db) << ','
       << format_sig6(r.sdr_simulated_db) << ',' << format_sig6(r.opta_db) << ','
       << format_sig6(r.bpam_db) << ',' << format_sig6(r.anomaly_rate) << ','
       << format_sig6(r.eps_approx) << ',' << format_sig6(r.eps_ch_weak) << ','
       << format_sig6(r.eps_ch_2nd);
    return os.str();
}

inline std::string write_sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = sweep_csv_header();
    out += '\n';
    for (const auto& r : rows) {
        out += to_csv_line(r);
        out += '\n';
    }
    return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
    std::vector<SweepRow> rows;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) return rows;
    if (line != sweep_csv_header())
        throw std::runtime_error("parse_sweep_csv: unexpected header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 14) throw std::runtime_error("parse_sweep_csv: bad row");
        SweepRow r;
        r.snr_db = std::stod(f[0]);
        r.mapping = f[1];
        r.delta = std::stod(f[2]);
        r.alpha1 = std::stod(f[3]);
        r.alpha2 = std::stod(f[4]);
        r.extras = f[5];
        r.sdr_analytical_db = std::stod(f[6]);
        r.sdr_simulated_db = std::stod(f[7]);
        r.opta_db = std::stod(f[8]);
        r.bpam_db = std::stod(f[9]);
        r.anomaly_rate = std::stod(f[10]);
        r.eps_approx = std::stod(f[11]);
        r.eps_ch_weak = std::stod(f[12]);
        r.eps_ch_2nd = std::stod(f[13]);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace skgeom
