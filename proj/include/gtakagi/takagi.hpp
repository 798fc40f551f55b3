#pragma once

#include <utility>
#include <vector>

#include "gtakagi/beta.hpp"
#include "gtakagi/dynamics.hpp"
#include "gtakagi/enclosure.hpp"
#include "gtakagi/errors.hpp"

namespace gtakagi {

namespace detail {

struct DigitScan {
    std::vector<int> digits;
    bool complete; // the expansion terminated inside the scan: all later digits are 0
};

inline DigitScan scan_digits(const BetaParam& base, const Enclosure& x, long depth) {
    Enclosure cx = clip_unit(x);
    if (base.is_two() && witness_is_one(cx))
        return {std::vector<int>(static_cast<size_t>(depth), 1), false};
    if (cx.has_witness()) {
        const BetaKernel& k = base.kernel();
        const ExactScalar& w = cx.witness();
        if (k.sign(w) < 0 || k.compare(w, ExactScalar::from_long(1)) > 0)
            throw domain_error("point outside [0,1]");
        ExactWalker walk(k, w);
        DigitScan s{{}, false};
        s.digits.reserve(static_cast<size_t>(depth));
        for (long i = 1; i <= depth; ++i) {
            if (walk.is_zero()) {
                s.complete = true;
                s.digits.resize(static_cast<size_t>(depth), 0);
                return s;
            }
            int d = walk.step();
            if (d == 2) throw internal_error("digit 2 outside the x=1, beta=2 corner");
            s.digits.push_back(d);
        }
        if (walk.is_zero()) s.complete = true;
        return s;
    }
    GreedyDigits g = digits(base, cx, depth);
    return {std::move(g.digits), false};
}

// sum_{n>d} n r^n = r^(d+1) ((d+1) - d r) / (1-r)^2, bounded from above.
inline Real tail_series_sum(const BetaParam& base, long d) {
    mpfr_prec_t p = 96;
    Real r_hi = base.inv_beta().hi();
    Real r_lo = base.inv_beta().lo();
    Real b = Real::pow_si(r_hi, d + 1, p, MPFR_RNDU);
    Real a(p); // (d+1) - d*r, maximized with the lower r
    mpfr_mul_si(a.raw(), r_lo.raw(), d, MPFR_RNDD);
    mpfr_si_sub(a.raw(), 0, a.raw(), MPFR_RNDU);
    mpfr_add_si(a.raw(), a.raw(), d + 1, MPFR_RNDU);
    Real c(p); // (1 - r)^2, minimized with the upper r
    mpfr_si_sub(c.raw(), 1, r_hi.raw(), MPFR_RNDD);
    mpfr_sqr(c.raw(), c.raw(), MPFR_RNDD);
    if (c.sgn() <= 0) throw internal_error("tail series denominator collapsed");
    Real out(p);
    mpfr_mul(out.raw(), b.raw(), a.raw(), MPFR_RNDU);
    mpfr_div(out.raw(), out.raw(), c.raw(), MPFR_RNDU);
    return out;
}

inline Real m_lower(const Enclosure& M) {
    Real lo = M.lo();
    if (lo.sgn() <= 0)
        throw domain_error("M must be certainly positive (raise the density depth)");
    return lo;
}

// Exact series pieces shared by both formulas:
//   A = sum g_n n beta^(-n),  B = sum g_n S_{n-1} beta^(-n),
//   C = sum g_n S_n beta^(-n)
struct SeriesSums {
    ExactScalar A, B, C;
};

// Evaluates the three sums by integer Horner recursion (value = inv * (c_1 +
// inv * (c_2 + ...))) over scaled coefficients, so no rational gcd runs per
// term; each sum canonicalizes exactly once at the end.
inline SeriesSums digit_series_sums(const BetaParam& base, const std::vector<int>& d) {
    const BetaKernel& k = base.kernel();
    long depth = static_cast<long>(d.size());
    std::vector<long> ca(static_cast<size_t>(depth), 0); // n g_n
    std::vector<long> cb(static_cast<size_t>(depth), 0); // S_{n-1} g_n
    std::vector<long> cc(static_cast<size_t>(depth), 0); // S_n g_n
    long ones = 0;
    for (long n = 1; n <= depth; ++n) {
        if (d[static_cast<size_t>(n - 1)] == 1) {
            ca[static_cast<size_t>(n - 1)] = n;
            cb[static_cast<size_t>(n - 1)] = ones;
            ++ones;
            cc[static_cast<size_t>(n - 1)] = ones;
        }
    }

    if (!k.is_quadratic()) {
        // inv = Q/P; sum c_n inv^n = (Horner integer) / P^depth
        const mpz_class P = k.beta_rational().get_num();
        const mpz_class Q = k.beta_rational().get_den();
        mpz_class ha(0), hb(0), hc(0), pw(1), pden(1);
        for (long n = depth; n >= 1; --n) {
            size_t i = static_cast<size_t>(n - 1);
            ha = ha * Q + ca[i] * pw;
            hb = hb * Q + cb[i] * pw;
            hc = hc * Q + cc[i] * pw;
            pw *= P;
        }
        pden = pw; // P^depth
        auto finish = [&](const mpz_class& h) {
            mpq_class q(h * Q, pden);
            q.canonicalize();
            return ExactScalar(q);
        };
        return {finish(ha), finish(hb), finish(hc)};
    }

    // quadratic: inv = (beta - v)/u; pair (a,b) * (beta - v) = (b u - a v, a)
    const long u = k.quad_u();
    const long v = k.quad_v();
    mpz_class a1(0), b1(0), a2(0), b2(0), a3(0), b3(0), pw(1);
    for (long n = depth; n >= 1; --n) {
        size_t i = static_cast<size_t>(n - 1);
        mpz_class na = b1 * u - a1 * v + ca[i] * pw;
        b1 = a1; a1 = std::move(na);
        na = b2 * u - a2 * v + cb[i] * pw;
        b2 = a2; a2 = std::move(na);
        na = b3 * u - a3 * v + cc[i] * pw;
        b3 = a3; a3 = std::move(na);
        pw *= u;
    }
    mpz_class pden = pw; // u^depth after the final inv factor
    auto finish = [&](mpz_class& a, mpz_class& b) {
        mpz_class fa = b * u - a * v;
        mpq_class qa(fa, pden), qb(a, pden);
        qa.canonicalize();
        qb.canonicalize();
        return ExactScalar(qa, qb);
    };
    return {finish(a1, b1), finish(a2, b2), finish(a3, b3)};
}

} // namespace detail

// Certified tail majorant for the defining series truncated at `depth`:
// every dropped term is at most n (1 + 1/M) beta^(-n).
inline Real g_tail_bound(const BetaParam& base, const Enclosure& M, long depth) {
    if (depth < 1) throw domain_error("depth must be >= 1");
    Real mlo = detail::m_lower(M);
    Real factor(96);
    mpfr_ui_div(factor.raw(), 1, mlo.raw(), MPFR_RNDU);
    mpfr_add_ui(factor.raw(), factor.raw(), 1, MPFR_RNDU);
    Real tail = detail::tail_series_sum(base, depth);
    Real out(96);
    mpfr_mul(out.raw(), tail.raw(), factor.raw(), MPFR_RNDU);
    return out;
}

// Tail majorant for the reformulated series: terms are at most
// (M n + n) beta^(-n), and the whole sum is divided by M at the end.
inline Real lemma1_tail_bound(const BetaParam& base, const Enclosure& M, long depth) {
    if (depth < 1) throw domain_error("depth must be >= 1");
    Real mlo = detail::m_lower(M);
    Real factor(96);
    mpfr_add_ui(factor.raw(), M.hi().raw(), 1, MPFR_RNDU);
    mpfr_div(factor.raw(), factor.raw(), mlo.raw(), MPFR_RNDU);
    Real tail = detail::tail_series_sum(base, depth);
    Real out(96);
    mpfr_mul(out.raw(), tail.raw(), factor.raw(), MPFR_RNDU);
    return out;
}

// Smallest depth whose defining-series tail drops below 2^-64.
inline long default_series_depth(const BetaParam& base, const Enclosure& M) {
    auto ok = [&](long d) {
        Real t = g_tail_bound(base, M, d);
        return t.is_zero() || t.exponent() <= -64;
    };
    long hi = 2;
    while (!ok(hi)) {
        if (hi > (1L << 32)) throw domain_error("series depth for this beta is impractical");
        hi *= 2;
    }
    long lo = 2;
    while (lo < hi) {
        long mid = lo + (hi - lo) / 2;
        if (ok(mid)) hi = mid; else lo = mid + 1;
    }
    return lo;
}

// Evaluates a digit prefix through both exact partial sums. `complete` means
// the prefix is the whole expansion, so no truncation tail applies and an
// exact M yields an exact value.
inline Enclosure g_def_from_digits(const BetaParam& base, const std::vector<int>& d,
                                   const Enclosure& M, bool complete) {
    detail::SeriesSums s = detail::digit_series_sums(base, d);
    if (complete && M.has_witness()) {
        const BetaKernel& k = base.kernel();
        ExactScalar val = k.sub(s.A, k.div(s.B, M.witness()));
        return base.enclose(val);
    }
    Enclosure value = Enclosure::sub(base.enclose(s.A),
                                     Enclosure::div(base.enclose(s.B), M));
    if (!complete)
        value = value.widened(g_tail_bound(base, M, static_cast<long>(d.size())));
    return value;
}

// G_beta(x) by the defining series
//   g_1/beta + sum_{n>=2} g_n beta^(-n) (n - S_{n-1}/M),
// evaluated as A - B/M with exact A, B (the digits are exact integers even
// when x itself is only a ball).
inline Enclosure g_def(const BetaParam& base, const Enclosure& x, const Enclosure& M,
                       long depth) {
    if (depth < 2) throw domain_error("series depth must be >= 2");
    detail::DigitScan scan = detail::scan_digits(base, x, depth);
    return g_def_from_digits(base, scan.digits, M, scan.complete);
}

// G_beta(x) by the reformulation
//   (1/M) (x + sum_{n>=1} g_n beta^(-n) (M n - S_n))  =  A + (x - C)/M.
inline Enclosure g_lemma1(const BetaParam& base, const Enclosure& x, const Enclosure& M,
                          long depth) {
    if (depth < 2) throw domain_error("series depth must be >= 2");
    Enclosure cx = detail::clip_unit(x);
    detail::DigitScan scan = detail::scan_digits(base, cx, depth);
    detail::SeriesSums s = detail::digit_series_sums(base, scan.digits);
    if (scan.complete && M.has_witness() && cx.has_witness()) {
        const BetaKernel& k = base.kernel();
        ExactScalar val =
            k.add(s.A, k.div(k.sub(cx.witness(), s.C), M.witness()));
        return base.enclose(val);
    }
    Enclosure value = Enclosure::add(
        base.enclose(s.A),
        Enclosure::div(Enclosure::sub(cx, base.enclose(s.C)), M));
    if (!scan.complete)
        value = value.widened(lemma1_tail_bound(base, M, depth));
    return value;
}

// Classical Takagi function via the tent-map series; the beta = 2 oracle.
inline Enclosure takagi_classical(const Enclosure& x, long depth) {
    if (depth < 1) throw domain_error("depth must be >= 1");
    Enclosure cx = detail::clip_unit(x);
    mpfr_prec_t p = cx.prec();
    if (cx.has_witness() && cx.witness().is_rational()) {
        mpq_class t = cx.witness().a;
        mpq_class acc(0);
        mpq_class pow(1);
        bool complete = false;
        for (long n = 1; n <= depth; ++n) {
            // T(t) = 1 - |1 - 2t|
            mpq_class u = 1 - 2 * t;
            t = 1 - (u < 0 ? mpq_class(-u) : u);
            if (t == 0) { complete = true; break; }
            pow /= 2;
            acc += t * pow;
        }
        Enclosure out = Enclosure::from_rational(acc, p);
        if (!complete) out = out.widened(Real::pow2(-depth, Enclosure::kRadiusPrec));
        return out;
    }
    Enclosure one = Enclosure::from_long(1, p);
    Enclosure two = Enclosure::from_long(2, p);
    Enclosure t = cx;
    Enclosure acc = Enclosure::from_long(0, p);
    for (long n = 1; n <= depth; ++n) {
        t = Enclosure::sub(one, Enclosure::abs(Enclosure::sub(one, Enclosure::mul(two, t))));
        Enclosure term = t;
        acc = Enclosure::add(acc, Enclosure(Real::mul_2si(term.value(), -n),
                                            Real::mul_2si(term.radius(), -n)));
    }
    return acc.widened(Real::pow2(-depth, Enclosure::kRadiusPrec));
}

// Both formula routes side by side; the reformulation identity makes the
// enclosures intersect.
struct GTakagiEval {
    BetaParam base;
    Enclosure M;
    long depth;
    Enclosure value_def;
    Enclosure value_lemma1;

    bool consistent() const { return value_def.overlaps(value_lemma1); }
};

inline GTakagiEval evaluate_both(const BetaParam& base, const Enclosure& x,
                                 const Enclosure& M, long depth) {
    return {base, M, depth, g_def(base, x, M, depth), g_lemma1(base, x, M, depth)};
}

} // namespace gtakagi
