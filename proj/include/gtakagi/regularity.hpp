#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gtakagi/beta.hpp"
#include "gtakagi/dynamics.hpp"
#include "gtakagi/enclosure.hpp"
#include "gtakagi/errors.hpp"
#include "gtakagi/measure.hpp"
#include "gtakagi/parallel.hpp"
#include "gtakagi/rng.hpp"
#include "gtakagi/takagi.hpp"

namespace gtakagi {

// ---------------------------------------------------------------------------
// Separation inequalities
// ---------------------------------------------------------------------------

struct Lemma2Report {
    long N = 0;
    int side = 0; // -1: y < x checks x-y >= tau^N(x)/beta^N, +1: y > x checks y-x >= (1-tau^N(x))/beta^N
    Enclosure lhs;
    Enclosure rhs;
    bool holds = false;
    bool certified = false;
};

inline Lemma2Report lemma2_check(const BetaParam& base, const Enclosure& x,
                                 const Enclosure& y, long max_depth = 4096) {
    Enclosure cx = detail::clip_unit(x);
    Enclosure cy = detail::clip_unit(y);
    const BetaKernel& k = base.kernel();
    if (cx.has_witness() && cy.has_witness() && k.equal(cx.witness(), cy.witness()))
        throw separation_not_found(max_depth);

    auto sep = separation_time(base, cx, cy, max_depth);
    if (!sep) throw separation_not_found(max_depth);
    long N = *sep;
    if (is_simple(base, cx, N) == Trilean::yes)
        throw domain_error("separation inequalities need a non-simple x");

    Lemma2Report rep;
    rep.N = N;
    bool exact = cx.has_witness() && cy.has_witness();
    if (exact) {
        const ExactScalar& wx = cx.witness();
        const ExactScalar& wy = cy.witness();
        rep.side = k.compare(wy, wx) < 0 ? -1 : +1;
        // tau^N(x) and beta^-N in the field
        ExactWalker walk(k, wx);
        ExactScalar pow = ExactScalar::from_long(1);
        const ExactScalar inv = k.inv_beta();
        for (long i = 0; i < N; ++i) {
            walk.step();
            pow = k.mul(pow, inv);
        }
        ExactScalar point = walk.value();
        ExactScalar lhs = rep.side < 0 ? k.sub(wx, wy) : k.sub(wy, wx);
        ExactScalar rhs = rep.side < 0
                              ? k.mul(point, pow)
                              : k.mul(k.sub(ExactScalar::from_long(1), point), pow);
        rep.lhs = base.enclose(lhs);
        rep.rhs = base.enclose(rhs);
        rep.holds = k.compare(lhs, rhs) >= 0;
        rep.certified = true;
        return rep;
    }

    OrbitTrace t = orbit(base, cx, N);
    if (!t.certified) throw ambiguous_branch(*t.ambiguous_at);
    Enclosure point = t.points.back();
    Enclosure pow = Enclosure::pow_si(base.beta(), -N);
    rep.side = Enclosure::certainly_lt(cy, cx) ? -1 : +1;
    rep.lhs = rep.side < 0 ? Enclosure::sub(cx, cy) : Enclosure::sub(cy, cx);
    rep.rhs = rep.side < 0
                  ? Enclosure::mul(point, pow)
                  : Enclosure::mul(Enclosure::sub(Enclosure::from_long(1, point.prec()), point),
                                   pow);
    if (rep.lhs.lo().cmp(rep.rhs.hi()) >= 0) {
        rep.holds = true;
        rep.certified = true;
    } else if (rep.lhs.hi().cmp(rep.rhs.lo()) < 0) {
        rep.holds = false;
        rep.certified = true;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Log-limit traces and Borel-Cantelli event counts
// ---------------------------------------------------------------------------

struct Lemma3Row {
    long n = 0;
    double log_tau = 0.0;           // (1/n) log_beta tau^n(x)
    double log_one_minus_tau = 0.0; // (1/n) log_beta (1 - tau^n(x))
    bool sentinel_tau = false;      // tau^n(x) = 0: the log is -infinity
    bool sentinel_one = false;      // tau^n(x) = 1 side degenerate
    bool event_A = false;           // tau^n(x) <= 1/n^2
    bool event_B = false;           // tau^n(x) >= 1 - 1/n^2
};

struct Lemma3Trace {
    std::vector<Lemma3Row> rows;
    long count_A = 0;
    long count_B = 0;
    long last_A = 0; // largest n with an A event (0 if none)
    long last_B = 0;
    long undecided = 0; // ball comparisons too wide to classify
};

inline Lemma3Trace lemma3_trace(const BetaParam& base, const Enclosure& x, long n_max) {
    if (n_max < 1) throw domain_error("n_max must be >= 1");
    OrbitTrace t = orbit(base, x, n_max);
    if (!t.certified) throw ambiguous_branch(*t.ambiguous_at);
    const BetaKernel& k = base.kernel();
    double log_beta = Real::log(base.beta().value(), 64, MPFR_RNDN).to_double();

    Lemma3Trace out;
    out.rows.reserve(static_cast<size_t>(n_max));
    for (long n = 1; n <= n_max; ++n) {
        const Enclosure& pt = t.points[static_cast<size_t>(n)];
        Lemma3Row row;
        row.n = n;
        bool is_zero = pt.has_witness() ? k.sign(pt.witness()) == 0
                                        : (pt.zero_radius() && pt.value().is_zero());
        if (is_zero) {
            row.sentinel_tau = true;
            row.log_tau = -std::numeric_limits<double>::infinity();
        } else {
            Real lg = Real::log(pt.value(), 64, MPFR_RNDN);
            row.log_tau = lg.to_double() / (static_cast<double>(n) * log_beta);
        }
        Enclosure one_minus = Enclosure::sub(Enclosure::from_long(1, pt.prec()), pt);
        if (one_minus.value().sgn() <= 0) {
            row.sentinel_one = true;
            row.log_one_minus_tau = -std::numeric_limits<double>::infinity();
        } else {
            Real lg = Real::log(one_minus.value(), 64, MPFR_RNDN);
            row.log_one_minus_tau = lg.to_double() / (static_cast<double>(n) * log_beta);
        }

        mpq_class thr(1, n * n); // n <= ~3e9 keeps n^2 inside long
        if (pt.has_witness()) {
            int ca = k.compare(pt.witness(), ExactScalar(thr));
            row.event_A = ca <= 0;
            int cb = k.compare(pt.witness(), ExactScalar(mpq_class(1) - thr));
            row.event_B = cb >= 0;
        } else {
            Enclosure thr_lo = Enclosure::from_rational(thr, pt.prec());
            Enclosure thr_hi = Enclosure::from_rational(mpq_class(1) - thr, pt.prec());
            if (pt.hi().cmp(thr_lo.lo()) <= 0) row.event_A = true;
            else if (pt.lo().cmp(thr_lo.hi()) <= 0) ++out.undecided;
            if (pt.lo().cmp(thr_hi.hi()) >= 0) row.event_B = true;
            else if (pt.hi().cmp(thr_hi.lo()) >= 0) ++out.undecided;
        }
        if (row.event_A) { ++out.count_A; out.last_A = n; }
        if (row.event_B) { ++out.count_B; out.last_B = n; }
        out.rows.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pointwise Hoelder probes against the explicit bound chain
// ---------------------------------------------------------------------------

struct HolderSample {
    double y = 0.0;
    double delta = 0.0;
    int side = 0;
    long N = 0;
    double quotient = 0.0;
    double bound = 0.0;
    bool holds = false;
};

struct HolderProbeReport {
    double x = 0.0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    long n_requested = 0;
    long n_certified = 0;
    long n_dropped = 0;
    std::vector<HolderSample> samples; // certified samples in draw order
    double max_quotient = 0.0;
    double max_bound = 0.0;
    bool all_hold = true;
};

// K(N) = 4 (N (1-1/beta) + 1/beta) / (1-1/beta)^2, the explicit constant
// bounding beta^N sum_{n>=N} 4 n beta^-n.
inline Enclosure holder_chain_constant(const BetaParam& base, long N) {
    mpfr_prec_t p = base.beta().prec();
    Enclosure one_minus = Enclosure::sub(Enclosure::from_long(1, p), base.inv_beta());
    Enclosure num = Enclosure::mul(
        Enclosure::from_long(4, p),
        Enclosure::add(Enclosure::mul(Enclosure::from_long(N, p), one_minus),
                       base.inv_beta()));
    return Enclosure::div(num, Enclosure::mul(one_minus, one_minus));
}

inline HolderProbeReport holder_probe(const BetaParam& base, const PiecewiseDensity& density,
                                      const Enclosure& x, double alpha, long n_samples,
                                      double delta_min, double delta_max,
                                      std::uint64_t seed, int workers = 1,
                                      long series_depth = 0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("alpha must lie in (0,1)");
    if (!(delta_min > 0.0 && delta_min < delta_max && delta_max <= 0.5))
        throw domain_error("need 0 < delta_min < delta_max <= 0.5");
    if (n_samples < 1) throw domain_error("n_samples must be >= 1");
    Enclosure cx = detail::clip_unit(x);
    const BetaKernel& k = base.kernel();
    if (cx.has_witness()) {
        if (k.sign(cx.witness()) <= 0 ||
            k.compare(cx.witness(), ExactScalar::from_long(1)) >= 0)
            throw domain_error("probe center must be interior to (0,1)");
    } else if (cx.lo().sgn() <= 0 || cx.hi().cmp_si(1) >= 0) {
        throw domain_error("probe center must be interior to (0,1)");
    }

    const Enclosure& M = density.M;
    long depth = series_depth > 0 ? series_depth : default_series_depth(base, M);
    Enclosure gx = g_def(base, cx, M, depth);
    long sep_budget =
        static_cast<long>(std::ceil(std::log(1.0 / delta_min) / std::log(base.beta_double()))) + 64;

    // one orbit of x reused by every sample's bound
    OrbitTrace trace = orbit(base, cx, sep_budget);
    if (!trace.certified) throw ambiguous_branch(*trace.ambiguous_at);

    HolderProbeReport rep;
    rep.x = cx.to_double();
    rep.alpha = alpha;
    rep.seed = seed;
    rep.n_requested = n_samples;

    struct Slot {
        bool kept = false;
        bool decided = false;
        HolderSample s;
    };
    std::vector<Slot> slots(static_cast<size_t>(n_samples));
    const double log_lo = std::log(delta_min);
    const double log_hi = std::log(delta_max);

    parallel_for(n_samples, workers, [&](long i) {
        Slot& slot = slots[static_cast<size_t>(i)];
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        int side = (i % 2 == 0) ? -1 : +1;
        double delta_d = std::exp(log_lo + rng.next_unit() * (log_hi - log_lo));
        mpq_class delta_q;
        mpq_set_d(delta_q.get_mpq_t(), delta_d); // doubles are dyadic: exact
        delta_q.canonicalize();
        if (delta_q <= 0) return;

        Enclosure y;
        if (cx.has_witness()) {
            ExactScalar wy = side < 0 ? k.sub(cx.witness(), ExactScalar(delta_q))
                                      : k.add(cx.witness(), ExactScalar(delta_q));
            if (k.sign(wy) <= 0 || k.compare(wy, ExactScalar::from_long(1)) >= 0) return;
            y = base.enclose(wy);
        } else {
            Enclosure dq = Enclosure::from_rational(delta_q, cx.prec());
            y = side < 0 ? Enclosure::sub(cx, dq) : Enclosure::add(cx, dq);
            if (y.lo().sgn() <= 0 || y.hi().cmp_si(1) >= 0) return;
        }

        try {
            auto sep = separation_time(base, cx, y, sep_budget);
            if (!sep) return;
            long N = *sep;
            Enclosure gy = g_def(base, y, M, depth);
            Enclosure dq_enc = Enclosure::from_rational(delta_q, cx.prec());
            Enclosure quotient = Enclosure::div(Enclosure::abs(Enclosure::sub(gx, gy)),
                                                Enclosure::pow_alpha(dq_enc, alpha));

            const Enclosure& tau_n = trace.points[static_cast<size_t>(N)];
            Enclosure tau_part =
                side < 0 ? tau_n
                         : Enclosure::sub(Enclosure::from_long(1, tau_n.prec()), tau_n);
            Enclosure kn = holder_chain_constant(base, N);
            Enclosure beta_pow = Enclosure::pow_alpha(Enclosure::pow_si(base.beta(), N),
                                                      1.0 - alpha);
            Enclosure denom = Enclosure::mul(
                M, Enclosure::mul(beta_pow, Enclosure::pow_alpha(tau_part, alpha)));
            Enclosure bound = Enclosure::add(
                Enclosure::div(Enclosure::from_long(1, tau_n.prec()), M),
                Enclosure::div(kn, denom));

            HolderSample s;
            s.y = y.to_double();
            s.delta = delta_d;
            s.side = side;
            s.N = N;
            s.quotient = quotient.to_double();
            s.bound = bound.to_double();
            if (quotient.hi().cmp(bound.lo()) <= 0) {
                s.holds = true;
                slot.decided = true;
            } else if (quotient.lo().cmp(bound.hi()) > 0) {
                s.holds = false;
                slot.decided = true;
            }
            slot.s = s;
            slot.kept = true;
        } catch (const error&) {
            // undecidable or degenerate sample: dropped and counted
        }
    });

    for (const Slot& slot : slots) {
        if (!slot.kept || !slot.decided) {
            ++rep.n_dropped;
            continue;
        }
        ++rep.n_certified;
        rep.samples.push_back(slot.s);
        rep.max_quotient = std::max(rep.max_quotient, slot.s.quotient);
        rep.max_bound = std::max(rep.max_bound, slot.s.bound);
        if (!slot.s.holds) rep.all_hold = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Non-Lipschitz witness sequences (difference quotients along truncations)
// ---------------------------------------------------------------------------

struct WitnessSequence {
    BetaParam base;
    Enclosure x;
    std::vector<long> ones;              // l(1) < ... < l(N_max+1)
    std::vector<Enclosure> truncations;  // x_N = sum_{n<=l(N)} g_n beta^-n
    std::vector<Enclosure> quotients_direct;  // (G(x_{N+1})-G(x_N)) / (x_{N+1}-x_N)
    std::vector<Enclosure> quotients_formula; // l(N+1) - S_{l(N+1)}/M + 1/M
    std::vector<Enclosure> statistic;    // running max of l(N) - S_{l(N)}/M
    bool identity_ok = true;
};

namespace detail {

// digits of x up to max_depth, stopping once `need_ones` ones were seen
inline std::vector<int> digits_until_ones(const BetaParam& base, const Enclosure& x,
                                          long need_ones, long max_depth, long& found) {
    Enclosure cx = clip_unit(x);
    std::vector<int> out;
    found = 0;
    if (base.is_two() && witness_is_one(cx)) {
        long take = std::min(max_depth, need_ones);
        out.assign(static_cast<size_t>(take), 1);
        found = take;
        return out;
    }
    if (cx.has_witness()) {
        ExactWalker walk(base.kernel(), cx.witness());
        for (long i = 1; i <= max_depth && found < need_ones; ++i) {
            if (walk.is_zero()) break;
            int d = walk.step();
            out.push_back(d);
            if (d == 1) ++found;
        }
        return out;
    }
    GreedyDigits g = digits(base, cx, max_depth);
    for (size_t i = 0; i < g.digits.size() && found < need_ones; ++i) {
        out.push_back(g.digits[i]);
        if (g.digits[i] == 1) ++found;
    }
    return out;
}

} // namespace detail

inline WitnessSequence witness_sequence(const BetaParam& base, const Enclosure& M,
                                        const Enclosure& x, long n_max,
                                        long max_depth = 0) {
    if (n_max < 1) throw domain_error("N_max must be >= 1");
    double m_lo = detail::m_lower(M).to_double();
    if (max_depth <= 0)
        max_depth = std::max<long>(1000,
            static_cast<long>(4.0 * static_cast<double>(n_max + 2) / m_lo) + 64);

    long found = 0;
    std::vector<int> d = detail::digits_until_ones(base, x, n_max + 1, max_depth, found);
    if (found < n_max + 1) throw not_enough_ones(found, n_max + 1);

    WitnessSequence w{base, x, {}, {}, {}, {}, {}, true};
    w.ones.reserve(static_cast<size_t>(n_max) + 1);
    for (size_t i = 0; i < d.size(); ++i)
        if (d[i] == 1) w.ones.push_back(static_cast<long>(i) + 1);
    w.ones.resize(static_cast<size_t>(n_max) + 1);

    const BetaKernel& k = base.kernel();
    std::vector<Enclosure> g_values;
    g_values.reserve(w.ones.size());
    for (long N = 1; N <= n_max + 1; ++N) {
        long l = w.ones[static_cast<size_t>(N - 1)];
        std::vector<int> prefix(d.begin(), d.begin() + l);
        w.truncations.push_back(synthesize(base, prefix));
        g_values.push_back(g_def_from_digits(base, prefix, M, /*complete=*/true));
    }

    bool exact = M.has_witness(); // truncations always carry witnesses
    Enclosure one = Enclosure::from_long(1, w.truncations.front().prec());
    for (long N = 1; N <= n_max; ++N) {
        size_t i = static_cast<size_t>(N - 1);
        long l_next = w.ones[i + 1];

        Enclosure dx;
        if (w.truncations[i + 1].has_witness() && w.truncations[i].has_witness()) {
            ExactScalar step = k.sub(w.truncations[i + 1].witness(),
                                     w.truncations[i].witness());
            // spacing must be exactly beta^-l(N+1)
            ExactScalar pow = ExactScalar::from_long(1);
            const ExactScalar inv = k.inv_beta();
            for (long j = 0; j < l_next; ++j) pow = k.mul(pow, inv);
            if (!(k.compare(step, pow) == 0))
                throw internal_error("truncation spacing is not beta^-l(N+1)");
            dx = base.enclose(step);
        } else {
            dx = Enclosure::sub(w.truncations[i + 1], w.truncations[i]);
        }

        Enclosure qd = Enclosure::div(Enclosure::sub(g_values[i + 1], g_values[i]), dx);
        Enclosure qf;
        if (exact) {
            // l(N+1) - (N+1)/M + 1/M = l(N+1) - N/M, in the field
            ExactScalar val = k.sub(ExactScalar::from_long(l_next),
                                    k.div(ExactScalar::from_long(N), M.witness()));
            qf = base.enclose(val);
            if (g_values[i + 1].has_witness() && g_values[i].has_witness() &&
                w.truncations[i + 1].has_witness()) {
                ExactScalar qd_exact = k.div(
                    k.sub(g_values[i + 1].witness(), g_values[i].witness()),
                    k.sub(w.truncations[i + 1].witness(), w.truncations[i].witness()));
                if (k.compare(qd_exact, val) != 0) w.identity_ok = false;
                qd = base.enclose(qd_exact);
            } else if (!qd.overlaps(qf)) {
                w.identity_ok = false;
            }
        } else {
            Enclosure l_enc = Enclosure::from_long(l_next, one.prec());
            Enclosure n_enc = Enclosure::from_long(N + 1, one.prec());
            qf = Enclosure::add(Enclosure::sub(l_enc, Enclosure::div(n_enc, M)),
                                Enclosure::div(one, M));
            if (!qd.overlaps(qf)) w.identity_ok = false;
        }
        w.quotients_direct.push_back(std::move(qd));
        w.quotients_formula.push_back(std::move(qf));
    }

    // running max of the divergence statistic l(N) - N/M
    Enclosure running;
    bool have = false;
    for (long N = 1; N <= n_max + 1; ++N) {
        size_t i = static_cast<size_t>(N - 1);
        Enclosure stat;
        if (exact) {
            ExactScalar val = k.sub(ExactScalar::from_long(w.ones[i]),
                                    k.div(ExactScalar::from_long(N), M.witness()));
            stat = base.enclose(val);
        } else {
            stat = Enclosure::sub(Enclosure::from_long(w.ones[i], one.prec()),
                                  Enclosure::div(Enclosure::from_long(N, one.prec()), M));
        }
        if (!have || stat.value().cmp(running.value()) > 0) {
            running = stat;
            have = true;
        }
        w.statistic.push_back(running);
    }
    return w;
}

struct LipschitzStatistic {
    Enclosure max_stat;
    long argmax_N = 0;
    std::vector<long> ones;
    std::vector<double> trace; // statistic value at each N
};

inline LipschitzStatistic lipschitz_statistic(const BetaParam& base, const Enclosure& M,
                                              const Enclosure& x, long depth) {
    if (depth < 1) throw domain_error("depth must be >= 1");
    long found = 0;
    std::vector<int> d = detail::digits_until_ones(base, x, depth + 1, depth, found);
    if (found == 0) throw not_enough_ones(0, 1);

    const BetaKernel& k = base.kernel();
    bool exact = M.has_witness();
    double m_d = M.to_double();
    LipschitzStatistic out;
    Enclosure best;
    ExactScalar best_exact;
    bool have = false;
    long N = 0;
    for (size_t i = 0; i < d.size(); ++i) {
        if (d[i] != 1) continue;
        ++N;
        long l = static_cast<long>(i) + 1;
        out.ones.push_back(l);
        out.trace.push_back(static_cast<double>(l) - static_cast<double>(N) / m_d);
        if (exact) {
            ExactScalar val = k.sub(ExactScalar::from_long(l),
                                    k.div(ExactScalar::from_long(N), M.witness()));
            if (!have || k.compare(val, best_exact) > 0) {
                best_exact = val;
                best = base.enclose(val);
                out.argmax_N = N;
                have = true;
            }
        } else {
            Enclosure val = Enclosure::sub(
                Enclosure::from_long(l, base.beta().prec()),
                Enclosure::div(Enclosure::from_long(N, base.beta().prec()), M));
            if (!have || val.value().cmp(best.value()) > 0) {
                best = val;
                out.argmax_N = N;
                have = true;
            }
        }
    }
    out.max_stat = best;
    return out;
}

} // namespace gtakagi
