#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtakagi/enclosure.hpp"
#include "gtakagi/measure.hpp"
#include "gtakagi/regularity.hpp"
#include "gtakagi/stats.hpp"

namespace gtakagi::io {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

// Shortest round-trip decimal for a double; identical bytes for identical
// bits, independent of locale or stream state.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// Full-working-precision decimal string for certified values.
inline std::string format_real(const Real& r) { return r.to_decimal_string(); }

inline std::string format_value(const Enclosure& e) { return format_real(e.value()); }
inline std::string format_radius(const Enclosure& e) { return format_real(e.radius()); }

// --- invariant_measure: density dump ---------------------------------------
//
//   beta,K,F,F_radius,M,M_radius
//   <one row>
//   breakpoint_lo,breakpoint_hi,level,level_radius
//   <one row per cell>

inline std::string density_csv(const PiecewiseDensity& d) {
    std::string out;
    out += "beta,K,F,F_radius,M,M_radius\n";
    out += format_value(d.base.beta()) + "," + std::to_string(d.K) + "," +
           format_value(d.F) + "," + format_radius(d.F) + "," + format_value(d.M) +
           "," + format_radius(d.M) + "\n";
    out += "breakpoint_lo,breakpoint_hi,level,level_radius\n";
    for (size_t j = 0; j + 1 < d.breakpoints.size(); ++j) {
        out += format_value(d.breakpoints[j]) + "," + format_value(d.breakpoints[j + 1]) +
               "," + format_value(d.levels[j]) + "," + format_radius(d.levels[j]) + "\n";
    }
    return out;
}

inline json density_json(const PiecewiseDensity& d) {
    json j;
    j["schema_version"] = schema_version;
    j["beta"] = format_value(d.base.beta());
    j["beta_label"] = d.base.label();
    j["K"] = d.K;
    j["finite_orbit"] = d.finite_orbit;
    j["tail_bound"] = format_real(d.tail_bound);
    j["F"] = format_value(d.F);
    j["F_radius"] = format_radius(d.F);
    j["M"] = format_value(d.M);
    j["M_radius"] = format_radius(d.M);
    json cells = json::array();
    for (size_t i = 0; i + 1 < d.breakpoints.size(); ++i) {
        json c;
        c["breakpoint_lo"] = format_value(d.breakpoints[i]);
        c["breakpoint_hi"] = format_value(d.breakpoints[i + 1]);
        c["level"] = format_value(d.levels[i]);
        c["level_radius"] = format_radius(d.levels[i]);
        cells.push_back(c);
    }
    j["cells"] = cells;
    return j;
}

// --- takagi: batch evaluation ----------------------------------------------

struct CurvePoint {
    Enclosure x;
    Enclosure value;
    long depth;
};

inline std::string curve_csv(const std::vector<CurvePoint>& pts) {
    std::string out = "x,value,radius,depth\n";
    for (const auto& p : pts)
        out += format_value(p.x) + "," + format_value(p.value) + "," +
               format_radius(p.value) + "," + std::to_string(p.depth) + "\n";
    return out;
}

inline json curve_json(const BetaParam& base, const Enclosure& M,
                       const std::vector<CurvePoint>& pts) {
    json j;
    j["schema_version"] = schema_version;
    j["beta"] = format_value(base.beta());
    j["beta_label"] = base.label();
    j["M"] = format_value(M);
    j["M_radius"] = format_radius(M);
    json arr = json::array();
    for (const auto& p : pts) {
        json q;
        q["x"] = format_value(p.x);
        q["value"] = format_value(p.value);
        q["radius"] = format_radius(p.value);
        q["depth"] = p.depth;
        arr.push_back(q);
    }
    j["points"] = arr;
    return j;
}

// --- regularity: probe and witness reports ----------------------------------

inline json holder_json(const BetaParam& base, const HolderProbeReport& r) {
    json j;
    j["schema_version"] = schema_version;
    j["beta"] = format_value(base.beta());
    j["beta_label"] = base.label();
    j["x"] = format_double(r.x);
    j["alpha"] = format_double(r.alpha);
    j["seed"] = r.seed;
    json arr = json::array();
    for (const auto& s : r.samples) {
        json q;
        q["y"] = format_double(s.y);
        q["delta"] = format_double(s.delta);
        q["side"] = s.side;
        q["N"] = s.N;
        q["quotient"] = format_double(s.quotient);
        q["bound"] = format_double(s.bound);
        q["holds"] = s.holds;
        arr.push_back(q);
    }
    j["samples"] = arr;
    j["max_quotient"] = format_double(r.max_quotient);
    j["max_bound"] = format_double(r.max_bound);
    j["counts"] = {{"requested", r.n_requested},
                   {"certified", r.n_certified},
                   {"dropped", r.n_dropped}};
    j["all_hold"] = r.all_hold;
    return j;
}

inline std::string holder_csv(const HolderProbeReport& r) {
    std::string out = "y,delta,side,N,quotient,bound,holds\n";
    for (const auto& s : r.samples)
        out += format_double(s.y) + "," + format_double(s.delta) + "," +
               std::to_string(s.side) + "," + std::to_string(s.N) + "," +
               format_double(s.quotient) + "," + format_double(s.bound) + "," +
               (s.holds ? "1" : "0") + "\n";
    return out;
}

inline std::string witness_csv(const WitnessSequence& w) {
    std::string out = "N,l_N,x_N,quotient_direct,quotient_formula,statistic\n";
    for (size_t i = 0; i < w.ones.size(); ++i) {
        out += std::to_string(i + 1) + "," + std::to_string(w.ones[i]) + "," +
               format_value(w.truncations[i]) + ",";
        if (i < w.quotients_direct.size()) {
            out += format_value(w.quotients_direct[i]) + "," +
                   format_value(w.quotients_formula[i]) + ",";
        } else {
            out += ",,";
        }
        out += format_value(w.statistic[i]) + "\n";
    }
    return out;
}

inline json witness_json(const WitnessSequence& w) {
    json j;
    j["schema_version"] = schema_version;
    j["beta"] = format_value(w.base.beta());
    j["beta_label"] = w.base.label();
    j["x"] = format_value(w.x);
    j["identity_ok"] = w.identity_ok;
    json rows = json::array();
    for (size_t i = 0; i < w.ones.size(); ++i) {
        json q;
        q["N"] = i + 1;
        q["l_N"] = w.ones[i];
        q["x_N"] = format_value(w.truncations[i]);
        if (i < w.quotients_direct.size()) {
            q["quotient_direct"] = format_value(w.quotients_direct[i]);
            q["quotient_direct_radius"] = format_radius(w.quotients_direct[i]);
            q["quotient_formula"] = format_value(w.quotients_formula[i]);
            q["quotient_formula_radius"] = format_radius(w.quotients_formula[i]);
        }
        q["statistic"] = format_value(w.statistic[i]);
        q["statistic_radius"] = format_radius(w.statistic[i]);
        rows.push_back(q);
    }
    j["rows"] = rows;
    return j;
}

inline json lemma2_json(const BetaParam& base, const Lemma2Report& r) {
    json j;
    j["schema_version"] = schema_version;
    j["beta"] = format_value(base.beta());
    j["beta_label"] = base.label();
    j["N"] = r.N;
    j["side"] = r.side;
    j["lhs"] = format_value(r.lhs);
    j["lhs_radius"] = format_radius(r.lhs);
    j["rhs"] = format_value(r.rhs);
    j["rhs_radius"] = format_radius(r.rhs);
    j["holds"] = r.holds;
    j["certified"] = r.certified;
    return j;
}

inline std::string lemma3_csv(const Lemma3Trace& t) {
    std::string out = "n,log_tau,log_one_minus_tau,event_A,event_B\n";
    for (const auto& row : t.rows)
        out += std::to_string(row.n) + "," +
               (row.sentinel_tau ? "-inf" : format_double(row.log_tau)) + "," +
               (row.sentinel_one ? "-inf" : format_double(row.log_one_minus_tau)) + "," +
               (row.event_A ? "1" : "0") + "," + (row.event_B ? "1" : "0") + "\n";
    return out;
}

inline json lemma3_json(const BetaParam& base, const Lemma3Trace& t) {
    json j;
    j["schema_version"] = schema_version;
    j["beta"] = format_value(base.beta());
    j["beta_label"] = base.label();
    j["count_A"] = t.count_A;
    j["count_B"] = t.count_B;
    j["last_A"] = t.last_A;
    j["last_B"] = t.last_B;
    j["undecided"] = t.undecided;
    json rows = json::array();
    for (const auto& row : t.rows) {
        json q;
        q["n"] = row.n;
        q["log_tau"] = row.sentinel_tau ? json("-inf") : json(format_double(row.log_tau));
        q["log_one_minus_tau"] =
            row.sentinel_one ? json("-inf") : json(format_double(row.log_one_minus_tau));
        q["event_A"] = row.event_A;
        q["event_B"] = row.event_B;
        rows.push_back(q);
    }
    j["rows"] = rows;
    return j;
}

// --- stats: CLT report -------------------------------------------------------

inline json clt_json(const CltRun& r) {
    json j;
    j["schema_version"] = schema_version;
    j["beta"] = r.beta_label;
    j["n"] = r.n;
    j["m"] = r.m;
    j["seed"] = r.seed;
    j["mode"] = to_string(r.mode);
    j["m_constant"] = format_double(r.m_constant);
    j["mean"] = format_double(r.mean);
    j["v_hat"] = format_double(r.v_hat);
    j["ks_distance"] = format_double(r.ks_distance);
    json hist = json::array();
    for (const auto& b : r.histogram)
        hist.push_back(json::array(
            {format_double(b.lo), format_double(b.hi), b.count}));
    j["histogram"] = hist;
    json cells = json::array();
    for (size_t i = 0; i < r.start_cell_counts.size(); ++i)
        cells.push_back(json::array(
            {format_double(r.start_cell_probs[i]), r.start_cell_counts[i]}));
    j["start_cells"] = cells;
    return j;
}

inline std::string clt_histogram_csv(const CltRun& r) {
    std::string out = "bin_lo,bin_hi,count\n";
    for (const auto& b : r.histogram)
        out += format_double(b.lo) + "," + format_double(b.hi) + "," +
               std::to_string(b.count) + "\n";
    return out;
}

} // namespace gtakagi::io
