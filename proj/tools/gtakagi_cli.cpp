// Command-line surface over the library: every subcommand emits a versioned
// JSON or CSV report and is deterministic for a fixed (config, seed), no
// matter how many workers run the sampling loops.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <gtakagi/gtakagi.hpp>
#include <gtakagi/io.hpp>

namespace {

using namespace gtakagi;
using io::json;

struct CommonOpts {
    std::string beta = "2";
    long precision_bits = 256;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;
    int workers = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--beta", o.beta, "base: decimal, fraction, or golden|sqrt2|sqrt3");
    cmd->add_option("--precision-bits", o.precision_bits, "working precision (>= 64)");
    cmd->add_option("--seed", o.seed, "RNG seed for sampling commands");
    cmd->add_option("--format", o.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--workers", o.workers, "worker threads for sampling fan-out");
}

void emit(const CommonOpts& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw domain_error("cannot open output file: " + o.out);
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// decimal, fraction, or digits:0110... (exact truncation point)
struct ParsedPoint {
    Enclosure x;
    DigitSource source = DigitSource::computed_from_point;
};

ParsedPoint parse_point(const BetaParam& base, const std::string& text) {
    if (text.rfind("digits:", 0) == 0) {
        std::vector<int> d;
        for (char c : text.substr(7)) {
            if (c != '0' && c != '1')
                throw domain_error("digit literals use only 0 and 1: " + text);
            d.push_back(c - '0');
        }
        if (d.empty()) throw domain_error("empty digit literal");
        if (!validate_user_digits(base, d))
            throw domain_error("digit list fails greedy round-trip validation: " + text);
        return {synthesize(base, d), DigitSource::user_supplied};
    }
    auto q = parse_rational(text);
    if (!q) throw domain_error("cannot parse point: " + text);
    if (*q < 0 || *q > 1) throw domain_error("point must lie in [0,1]: " + text);
    return {Enclosure::from_rational(*q, base.precision_bits()),
            DigitSource::computed_from_point};
}

json base_header(const BetaParam& base) {
    json j;
    j["schema_version"] = io::schema_version;
    j["beta"] = io::format_value(base.beta());
    j["beta_label"] = base.label();
    j["precision_bits"] = base.precision_bits();
    return j;
}

// --- digits ------------------------------------------------------------------

int cmd_digits(const CommonOpts& o, const std::string& x_text, long depth) {
    BetaParam base = BetaParam::named(o.beta, o.precision_bits);
    ParsedPoint p = parse_point(base, x_text);
    GreedyDigits d = digits(base, p.x, depth);
    d.source = p.source;
    Trilean simple = is_simple(base, p.x, depth);

    std::string digit_string;
    for (int g : d.digits) digit_string += static_cast<char>('0' + g);

    if (o.format == "csv") {
        std::string csv = "n,digit\n";
        for (size_t i = 0; i < d.digits.size(); ++i)
            csv += std::to_string(i + 1) + "," + std::to_string(d.digits[i]) + "\n";
        emit(o, csv);
        return 0;
    }
    json j = base_header(base);
    j["x"] = io::format_value(p.x);
    j["x_radius"] = io::format_radius(p.x);
    j["depth"] = depth;
    j["digits"] = digit_string;
    j["certified"] = d.certified;
    j["simple"] = to_string(simple);
    j["source"] = d.source == DigitSource::user_supplied ? "user-supplied"
                                                         : "computed-from-point";
    emit(o, dump(j));
    return 0;
}

// --- eval ---------------------------------------------------------------------

int cmd_eval(const CommonOpts& o, const std::string& x_text, long depth, long k_depth) {
    BetaParam base = BetaParam::named(o.beta, o.precision_bits);
    ParsedPoint p = parse_point(base, x_text);
    if (k_depth <= 0) k_depth = default_density_depth(base);
    PiecewiseDensity den = build_density(base, k_depth);
    if (depth <= 0) depth = default_series_depth(base, den.M);

    GTakagiEval ev = evaluate_both(base, p.x, den.M, depth);
    json j = base_header(base);
    j["x"] = io::format_value(p.x);
    j["depth"] = depth;
    j["K"] = k_depth;
    j["M"] = io::format_value(den.M);
    j["M_radius"] = io::format_radius(den.M);
    j["value_def"] = io::format_value(ev.value_def);
    j["value_def_radius"] = io::format_radius(ev.value_def);
    j["value_lemma1"] = io::format_value(ev.value_lemma1);
    j["value_lemma1_radius"] = io::format_radius(ev.value_lemma1);
    j["tail_bound"] = io::format_real(g_tail_bound(base, den.M, depth));
    j["consistent"] = ev.consistent();
    if (base.is_two()) {
        Enclosure classical = takagi_classical(p.x, depth);
        Enclosure delta = Enclosure::abs(Enclosure::sub(ev.value_def, classical));
        Real budget(Enclosure::kRadiusPrec);
        mpfr_add(budget.raw(), ev.value_def.radius().raw(), classical.radius().raw(),
                 MPFR_RNDU);
        j["classical"] = io::format_value(classical);
        j["classical_radius"] = io::format_radius(classical);
        j["cross_check_delta"] = io::format_value(delta);
        j["cross_check_ok"] = delta.value().cmp(budget) <= 0;
    }
    if (o.format == "csv") {
        std::string csv = "x,value,radius,depth\n";
        csv += io::format_value(p.x) + "," + io::format_value(ev.value_def) + "," +
               io::format_radius(ev.value_def) + "," + std::to_string(depth) + "\n";
        emit(o, csv);
        return 0;
    }
    emit(o, dump(j));
    return 0;
}

// --- curve ---------------------------------------------------------------------

int cmd_curve(const CommonOpts& o, long points, long depth, long k_depth) {
    if (points < 2) throw domain_error("curve needs at least 2 points");
    BetaParam base = BetaParam::named(o.beta, o.precision_bits);
    if (k_depth <= 0) k_depth = default_density_depth(base);
    PiecewiseDensity den = build_density(base, k_depth);
    if (depth <= 0) depth = default_series_depth(base, den.M);

    std::vector<io::CurvePoint> pts(static_cast<size_t>(points),
                                    io::CurvePoint{Enclosure(), Enclosure(), depth});
    parallel_for(points, o.workers, [&](long i) {
        mpq_class q(i, points - 1);
        q.canonicalize();
        Enclosure x = Enclosure::from_rational(q, base.precision_bits());
        pts[static_cast<size_t>(i)] = {x, g_def(base, x, den.M, depth), depth};
    });
    if (o.format == "csv") {
        emit(o, io::curve_csv(pts));
        return 0;
    }
    emit(o, dump(io::curve_json(base, den.M, pts)));
    return 0;
}

// --- measure ---------------------------------------------------------------------

int cmd_measure(const CommonOpts& o, long k_depth, const std::string& a_text,
                const std::string& b_text) {
    BetaParam base = BetaParam::named(o.beta, o.precision_bits);
    if (k_depth <= 0) k_depth = default_density_depth(base);
    PiecewiseDensity den = build_density(base, k_depth);

    std::optional<Enclosure> interval;
    if (!a_text.empty() || !b_text.empty()) {
        if (a_text.empty() || b_text.empty())
            throw domain_error("interval query needs both --a and --b");
        Enclosure a = parse_point(base, a_text).x;
        Enclosure b = parse_point(base, b_text).x;
        interval = interval_measure(den, a, b);
    }
    if (o.format == "csv") {
        emit(o, io::density_csv(den));
        return 0;
    }
    json j = io::density_json(den);
    if (interval) {
        j["interval"] = {{"a", a_text},
                         {"b", b_text},
                         {"measure", io::format_value(*interval)},
                         {"radius", io::format_radius(*interval)}};
    }
    emit(o, dump(j));
    return 0;
}

// --- holder ---------------------------------------------------------------------

int cmd_holder(const CommonOpts& o, const std::string& x_text, double alpha,
               long samples, double delta_min, double delta_max, long k_depth,
               long depth) {
    BetaParam base = BetaParam::named(o.beta, o.precision_bits);
    ParsedPoint p = parse_point(base, x_text);
    if (k_depth <= 0) k_depth = default_density_depth(base);
    PiecewiseDensity den = build_density(base, k_depth);
    HolderProbeReport rep = holder_probe(base, den, p.x, alpha, samples, delta_min,
                                         delta_max, o.seed, o.workers, depth);
    if (o.format == "csv") {
        emit(o, io::holder_csv(rep));
        return 0;
    }
    emit(o, dump(io::holder_json(base, rep)));
    return 0;
}

// --- witness ---------------------------------------------------------------------

int cmd_witness(const CommonOpts& o, const std::string& x_text, long n_max,
                long k_depth, long max_depth) {
    BetaParam base = BetaParam::named(o.beta, o.precision_bits);
    ParsedPoint p = parse_point(base, x_text);
    if (k_depth <= 0) k_depth = default_density_depth(base);
    PiecewiseDensity den = build_density(base, k_depth);
    WitnessSequence w = witness_sequence(base, den.M, p.x, n_max, max_depth);
    LipschitzStatistic stat = lipschitz_statistic(
        base, den.M, p.x, w.ones.back());
    if (o.format == "csv") {
        emit(o, io::witness_csv(w));
        return 0;
    }
    json j = io::witness_json(w);
    j["max_statistic"] = io::format_value(stat.max_stat);
    j["argmax_N"] = stat.argmax_N;
    emit(o, dump(j));
    return 0;
}

// --- clt ---------------------------------------------------------------------

int cmd_clt(const CommonOpts& o, long n, long m, const std::string& mode_text,
            long k_depth) {
    BetaParam base = BetaParam::named(o.beta, o.precision_bits);
    if (k_depth <= 0) k_depth = default_density_depth(base);
    PiecewiseDensity den = build_density(base, k_depth);
    OrbitMode mode = mode_text == "certified" ? OrbitMode::certified : OrbitMode::fast;
    CltRun run = clt_run(base, den, n, m, o.seed, mode, o.workers);
    if (o.format == "csv") {
        emit(o, io::clt_histogram_csv(run));
        return 0;
    }
    emit(o, dump(io::clt_json(run)));
    return 0;
}

// --- lemma2 / lemma3 ------------------------------------------------------------

int cmd_lemma2(const CommonOpts& o, const std::string& x_text, const std::string& y_text,
               long max_depth) {
    BetaParam base = BetaParam::named(o.beta, o.precision_bits);
    ParsedPoint px = parse_point(base, x_text);
    ParsedPoint py = parse_point(base, y_text);
    Lemma2Report rep = lemma2_check(base, px.x, py.x, max_depth);
    if (o.format == "csv") {
        std::string csv = "N,side,lhs,lhs_radius,rhs,rhs_radius,holds,certified\n";
        csv += std::to_string(rep.N) + "," + std::to_string(rep.side) + "," +
               io::format_value(rep.lhs) + "," + io::format_radius(rep.lhs) + "," +
               io::format_value(rep.rhs) + "," + io::format_radius(rep.rhs) + "," +
               (rep.holds ? "1" : "0") + "," + (rep.certified ? "1" : "0") + "\n";
        emit(o, csv);
        return 0;
    }
    json j = io::lemma2_json(base, rep);
    j["x"] = io::format_value(px.x);
    j["y"] = io::format_value(py.x);
    emit(o, dump(j));
    return 0;
}

int cmd_lemma3(const CommonOpts& o, const std::string& x_text, long n_max) {
    BetaParam base = BetaParam::named(o.beta, o.precision_bits);
    ParsedPoint p = parse_point(base, x_text);
    Lemma3Trace t = lemma3_trace(base, p.x, n_max);
    if (o.format == "csv") {
        emit(o, io::lemma3_csv(t));
        return 0;
    }
    json j = io::lemma3_json(base, t);
    j["x"] = io::format_value(p.x);
    emit(o, dump(j));
    return 0;
}

int error_exit(const CommonOpts& o, const error& e) {
    json j;
    j["schema_version"] = io::schema_version;
    j["error"] = {{"code", e.code()}, {"message", e.what()}};
    emit(o, dump(j));
    return e.code();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"greedy beta-expansions, the Parry measure and the generalized "
                 "Takagi function with certified error bounds"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string x_text, y_text, a_text, b_text, mode_text = "fast";
    long depth = 0, k_depth = 0, n_max = 50, points = 256, samples = 1000;
    long n = 10000, m = 10000, max_depth = 4096, witness_depth = 0;
    double alpha = 0.5, delta_min = 1e-9, delta_max = 1e-2;

    auto* c_digits = app.add_subcommand("digits", "greedy digits of a point");
    add_common(c_digits, o);
    c_digits->add_option("--x", x_text, "point")->required();
    c_digits->add_option("--depth", depth, "number of digits");

    auto* c_eval = app.add_subcommand("eval", "generalized Takagi value by both formulas");
    add_common(c_eval, o);
    c_eval->add_option("--x", x_text, "point")->required();
    c_eval->add_option("--depth", depth, "series depth (0 = tail <= 2^-64)");
    c_eval->add_option("--k", k_depth, "density truncation (0 = auto)");

    auto* c_curve = app.add_subcommand("curve", "values on a uniform grid for plotting");
    add_common(c_curve, o);
    c_curve->add_option("--points", points, "grid size");
    c_curve->add_option("--depth", depth, "series depth (0 = auto)");
    c_curve->add_option("--k", k_depth, "density truncation (0 = auto)");

    auto* c_measure = app.add_subcommand("measure", "Parry density, F, M, interval measure");
    add_common(c_measure, o);
    c_measure->add_option("--k", k_depth, "density truncation (0 = auto)");
    c_measure->add_option("--a", a_text, "interval left end");
    c_measure->add_option("--b", b_text, "interval right end");

    auto* c_holder = app.add_subcommand("holder", "pointwise Hoelder quotient probe");
    add_common(c_holder, o);
    c_holder->add_option("--x", x_text, "probe center")->required();
    c_holder->add_option("--alpha", alpha, "Hoelder exponent in (0,1)");
    c_holder->add_option("--samples", samples, "number of probes");
    c_holder->add_option("--delta-min", delta_min, "smallest distance");
    c_holder->add_option("--delta-max", delta_max, "largest distance");
    c_holder->add_option("--k", k_depth, "density truncation (0 = auto)");
    c_holder->add_option("--depth", depth, "series depth (0 = auto)");

    auto* c_witness = app.add_subcommand("witness", "non-Lipschitz witness sequence");
    add_common(c_witness, o);
    c_witness->add_option("--x", x_text, "source point")->required();
    c_witness->add_option("--n-max", n_max, "number of quotients");
    c_witness->add_option("--k", k_depth, "density truncation (0 = auto)");
    c_witness->add_option("--max-depth", witness_depth, "digit budget (0 = auto)");

    auto* c_clt = app.add_subcommand("clt", "central limit theorem for the digit sums");
    add_common(c_clt, o);
    c_clt->add_option("--n", n, "orbit length per sample");
    c_clt->add_option("--m", m, "number of samples");
    c_clt->add_option("--mode", mode_text, "certified|fast")
        ->check(CLI::IsMember({"certified", "fast"}));
    c_clt->add_option("--k", k_depth, "density truncation (0 = auto)");

    auto* c_lemma2 = app.add_subcommand("lemma2", "separation inequalities for a pair");
    add_common(c_lemma2, o);
    c_lemma2->add_option("--x", x_text, "non-simple point")->required();
    c_lemma2->add_option("--y", y_text, "comparison point")->required();
    c_lemma2->add_option("--max-depth", max_depth, "separation search depth");

    auto* c_lemma3 = app.add_subcommand("lemma3", "log-limit trace and event counts");
    add_common(c_lemma3, o);
    c_lemma3->add_option("--x", x_text, "point")->required();
    c_lemma3->add_option("--n-max", n_max, "orbit length");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_digits->parsed()) return cmd_digits(o, x_text, depth > 0 ? depth : 32);
        if (c_eval->parsed()) return cmd_eval(o, x_text, depth, k_depth);
        if (c_curve->parsed()) return cmd_curve(o, points, depth, k_depth);
        if (c_measure->parsed()) return cmd_measure(o, k_depth, a_text, b_text);
        if (c_holder->parsed())
            return cmd_holder(o, x_text, alpha, samples, delta_min, delta_max, k_depth, depth);
        if (c_witness->parsed()) return cmd_witness(o, x_text, n_max, k_depth, witness_depth);
        if (c_clt->parsed()) return cmd_clt(o, n, m, mode_text, k_depth);
        if (c_lemma2->parsed()) return cmd_lemma2(o, x_text, y_text, max_depth);
        if (c_lemma3->parsed()) return cmd_lemma3(o, x_text, n_max);
    } catch (const error& e) {
        return error_exit(o, e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
