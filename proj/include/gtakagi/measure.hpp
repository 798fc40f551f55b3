#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "gtakagi/beta.hpp"
#include "gtakagi/dynamics.hpp"
#include "gtakagi/enclosure.hpp"
#include "gtakagi/errors.hpp"

namespace gtakagi {

// The Parry density truncated at orbit depth K:
//
//   rho(x) = (1/F) sum_{n=0..K} beta^{-n} [x <= tau^n(1)]
//
// stored as the distinct orbit values of 1 (breakpoints) with the geometric
// weight mass sitting on each, plus a certified bound on everything the
// truncation dropped. F normalizes, M is the measure of [1/beta, 1].
struct PiecewiseDensity {
    BetaParam base;
    long K;             // requested truncation depth
    long K_eff;         // last orbit index actually summed
    bool finite_orbit;  // the orbit of 1 reached 0 exactly; the sum is complete
    std::vector<Enclosure> breakpoints; // ascending, first 0, last 1
    std::vector<Enclosure> weights;     // mass sum beta^{-n} attached to each breakpoint
    std::vector<Enclosure> levels;      // unnormalized density on cell (b_j, b_{j+1})
    Real tail_bound;                    // beta^{-(K+1)}/(1 - 1/beta), or 0 if complete
    Enclosure F;
    Enclosure M;
};

namespace detail {

// Upper bound on sum_{n>K} beta^{-n} = beta^{-(K+1)} / (1 - 1/beta).
inline Real density_tail_bound(const BetaParam& base, long K) {
    Real r_hi = base.inv_beta().hi();
    Real pow = Real::pow_si(r_hi, K + 1, base.precision_bits(), MPFR_RNDU);
    Real den(Enclosure::kRadiusPrec);
    mpfr_si_sub(den.raw(), 1, base.inv_beta().hi().raw(), MPFR_RNDD);
    if (den.sgn() <= 0) throw internal_error("tail bound denominator collapsed");
    Real out(Enclosure::kRadiusPrec);
    mpfr_div(out.raw(), pow.raw(), den.raw(), MPFR_RNDU);
    return out;
}

} // namespace detail

// Smallest K whose analytic tail bound drops below 2^(-precision/2).
inline long default_density_depth(const BetaParam& base) {
    long target = -(base.precision_bits() / 2);
    long lo = 1, hi = 1;
    auto small_enough = [&](long k) {
        Real t = detail::density_tail_bound(base, k);
        return t.is_zero() || t.exponent() <= target;
    };
    while (!small_enough(hi)) {
        if (hi > (1L << 40)) throw domain_error("density depth for this beta is impractical");
        hi *= 2;
    }
    while (lo < hi) {
        long mid = lo + (hi - lo) / 2;
        if (small_enough(mid)) hi = mid; else lo = mid + 1;
    }
    return std::max(1L, lo);
}

// Builds the truncated Parry density. The orbit of 1 is always walked in the
// exact kernel (every base this library constructs is rational or quadratic),
// so breakpoints and weights carry exact witnesses and F and M are exact
// whenever the orbit of 1 terminates.
inline PiecewiseDensity build_density(const BetaParam& base, long K) {
    if (K < 1) throw domain_error("density depth K must be >= 1");
    const BetaKernel& k = base.kernel();
    const ExactScalar one = ExactScalar::from_long(1);
    const ExactScalar inv_beta = k.inv_beta();
    const ExactScalar& branch = base.inv_beta_exact();

    // orbit of 1 under the map (tau(1) = beta - [beta], so 0 at beta = 2)
    std::vector<std::pair<ExactScalar, ExactScalar>> terms; // (tau^n(1), beta^-n)
    ExactWalker walk(k, one);
    ExactScalar pow = one;
    bool finite = false;
    long k_eff = K;
    ExactScalar f_sum = ExactScalar::from_long(0);
    ExactScalar m_sum = ExactScalar::from_long(0);
    for (long n = 0; n <= K; ++n) {
        if (walk.is_zero()) {
            finite = true;
            k_eff = n - 1;
            break;
        }
        ExactScalar point = walk.value();
        terms.emplace_back(point, pow);
        f_sum = k.add(f_sum, k.mul(point, pow));
        if (k.compare(point, branch) > 0)
            m_sum = k.add(m_sum, k.mul(k.sub(point, branch), pow));
        walk.step();
        pow = k.mul(pow, inv_beta);
    }
    if (!finite && walk.is_zero()) finite = true;

    // group coincident orbit values, accumulate their weights
    std::vector<size_t> order(terms.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return k.compare(terms[a].first, terms[b].first) < 0;
    });
    std::vector<ExactScalar> values;
    std::vector<ExactScalar> masses;
    for (size_t idx : order) {
        const auto& [v, w] = terms[idx];
        if (!values.empty() && k.compare(values.back(), v) == 0)
            masses.back() = k.add(masses.back(), w);
        else {
            values.push_back(v);
            masses.push_back(w);
        }
    }
    // prepend breakpoint 0 (mass 0); tau^0(1) = 1 is always the top value
    values.insert(values.begin(), ExactScalar::from_long(0));
    masses.insert(masses.begin(), ExactScalar::from_long(0));

    PiecewiseDensity d{base, K, k_eff, finite, {}, {}, {},
                       Real(Enclosure::kRadiusPrec), Enclosure(), Enclosure()};
    if (!finite) d.tail_bound = detail::density_tail_bound(base, K);

    d.breakpoints.reserve(values.size());
    d.weights.reserve(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        d.breakpoints.push_back(base.enclose(values[i]));
        d.weights.push_back(base.enclose(masses[i]));
    }
    // suffix sums: level on cell (b_j, b_{j+1}) counts every value >= b_{j+1}
    std::vector<ExactScalar> suffix(values.size() + 1, ExactScalar::from_long(0));
    for (size_t i = values.size(); i-- > 0;)
        suffix[i] = k.add(suffix[i + 1], masses[i]);
    d.levels.reserve(values.size() - 1);
    for (size_t j = 0; j + 1 < values.size(); ++j) {
        Enclosure lvl = base.enclose(suffix[j + 1]);
        if (!finite) lvl = lvl.widened(d.tail_bound);
        d.levels.push_back(std::move(lvl));
    }

    d.F = base.enclose(f_sum);
    Enclosure m_enc = base.enclose(m_sum);
    if (!finite) {
        d.F = d.F.widened(d.tail_bound);
        Real m_tail(Enclosure::kRadiusPrec);
        Real one_minus_r(Enclosure::kRadiusPrec);
        mpfr_si_sub(one_minus_r.raw(), 1, base.inv_beta().lo().raw(), MPFR_RNDU);
        mpfr_mul(m_tail.raw(), d.tail_bound.raw(), one_minus_r.raw(), MPFR_RNDU);
        m_enc = m_enc.widened(m_tail);
    }
    d.M = Enclosure::div(m_enc, d.F);
    if (finite) {
        // the sums are complete, so F and M are exact field elements
        d.M.set_witness(std::make_shared<const ExactScalar>(k.div(m_sum, f_sum)));
    }

    if (d.F.value().cmp_si(1) < 0 && !d.F.contains(Real::from_si(1, 64)))
        throw internal_error("normalizer F below 1");
    double mv = d.M.to_double();
    if (mv <= 0.0 || mv >= 1.0)
        throw internal_error("digit-frequency constant M outside (0,1)");
    return d;
}

// Pointwise density value. A point that cannot be placed on one side of a
// breakpoint widens the result across the touching cells instead of failing.
inline Enclosure density_eval(const PiecewiseDensity& d, const Enclosure& x) {
    Enclosure cx = detail::clip_unit(x);
    const BetaKernel& k = d.base.kernel();
    size_t n = d.breakpoints.size();

    // level(x) = suffix mass over breakpoints >= x
    auto suffix_from = [&](size_t i) {
        ExactScalar acc = ExactScalar::from_long(0);
        bool exact = true;
        Enclosure ball = Enclosure::from_long(0, cx.prec());
        for (size_t j = i; j < n; ++j) {
            if (exact && d.weights[j].has_witness())
                acc = k.add(acc, d.weights[j].witness());
            else
                exact = false;
            ball = Enclosure::add(ball, d.weights[j]);
        }
        return exact ? d.base.enclose(acc) : ball;
    };

    size_t idx_lo = n, idx_hi = n; // first breakpoint >= x.hi resp. >= x.lo
    if (cx.has_witness()) {
        const ExactScalar& w = cx.witness();
        size_t i = 0;
        while (i < n && d.breakpoints[i].has_witness() &&
               k.compare(d.breakpoints[i].witness(), w) < 0)
            ++i;
        idx_lo = idx_hi = i;
    } else {
        Real xl = cx.lo(), xh = cx.hi();
        idx_hi = 0;
        while (idx_hi < n && d.breakpoints[idx_hi].hi().cmp(xl) < 0) ++idx_hi;
        idx_lo = 0;
        while (idx_lo < n && d.breakpoints[idx_lo].lo().cmp(xh) < 0) ++idx_lo;
        if (idx_lo > idx_hi) std::swap(idx_lo, idx_hi);
    }

    Enclosure level = suffix_from(idx_lo);
    if (idx_hi != idx_lo) {
        // straddling: hull of the touched levels
        Enclosure lvl2 = suffix_from(idx_hi);
        Real lo = Real::min(level.lo(), lvl2.lo());
        Real hi = Real::max(level.hi(), lvl2.hi());
        Real mid = Real::mul_2si(Real::add(lo, hi, cx.prec(), MPFR_RNDN), -1);
        Real r1(Enclosure::kRadiusPrec), r2(Enclosure::kRadiusPrec);
        mpfr_sub(r1.raw(), mid.raw(), lo.raw(), MPFR_RNDU);
        mpfr_sub(r2.raw(), hi.raw(), mid.raw(), MPFR_RNDU);
        level = Enclosure(std::move(mid), Real::max(r1, r2));
    }
    if (!d.finite_orbit) level = level.widened(d.tail_bound);
    return Enclosure::div(level, d.F);
}

// m_beta([a,b]) with the truncation tail in the radius. Also asserts the
// density upper bound m([a,b]) <= (b-a) / (F (1-1/beta)).
inline Enclosure interval_measure(const PiecewiseDensity& d, const Enclosure& a,
                                  const Enclosure& b) {
    const BetaKernel& k = d.base.kernel();
    Enclosure ca = detail::clip_unit(a);
    Enclosure cb = detail::clip_unit(b);
    bool exact = ca.has_witness() && cb.has_witness();
    if (exact) {
        if (k.compare(ca.witness(), cb.witness()) > 0)
            throw domain_error("interval_measure requires a <= b");
    } else if (ca.lo().cmp(cb.hi()) > 0) {
        throw domain_error("interval_measure requires a <= b");
    }

    mpfr_prec_t p = std::max(ca.prec(), cb.prec());
    Enclosure total = Enclosure::from_long(0, p);
    ExactScalar total_exact = ExactScalar::from_long(0);
    bool all_exact = exact;
    for (size_t i = 1; i < d.breakpoints.size(); ++i) { // skip breakpoint 0, mass 0
        const Enclosure& v = d.breakpoints[i];
        const Enclosure& w = d.weights[i];
        if (all_exact && v.has_witness() && w.has_witness()) {
            // |[a,b] /\ [0,v]| = max(0, min(b, v) - a)
            const ExactScalar& bv = k.compare(cb.witness(), v.witness()) < 0
                                        ? cb.witness() : v.witness();
            ExactScalar len = k.sub(bv, ca.witness());
            if (k.sign(len) > 0)
                total_exact = k.add(total_exact, k.mul(len, w.witness()));
        } else {
            all_exact = false;
            Real len_lo(p), len_hi(p);
            mpfr_min(len_lo.raw(), cb.lo().raw(), v.lo().raw(), MPFR_RNDD);
            mpfr_sub(len_lo.raw(), len_lo.raw(), ca.hi().raw(), MPFR_RNDD);
            if (len_lo.sgn() < 0) mpfr_set_zero(len_lo.raw(), 1);
            mpfr_min(len_hi.raw(), cb.hi().raw(), v.hi().raw(), MPFR_RNDU);
            mpfr_sub(len_hi.raw(), len_hi.raw(), ca.lo().raw(), MPFR_RNDU);
            if (len_hi.sgn() < 0) mpfr_set_zero(len_hi.raw(), 1);
            Real mid = Real::mul_2si(Real::add(len_lo, len_hi, p, MPFR_RNDN), -1);
            Real r1(Enclosure::kRadiusPrec), r2(Enclosure::kRadiusPrec);
            mpfr_sub(r1.raw(), mid.raw(), len_lo.raw(), MPFR_RNDU);
            mpfr_sub(r2.raw(), len_hi.raw(), mid.raw(), MPFR_RNDU);
            Enclosure len(std::move(mid), Real::max(r1, r2));
            total = Enclosure::add(total, Enclosure::mul(len, w));
        }
    }
    Enclosure numerator = all_exact ? d.base.enclose(total_exact) : total;
    if (!d.finite_orbit) {
        Real span(Enclosure::kRadiusPrec);
        mpfr_sub(span.raw(), cb.hi().raw(), ca.lo().raw(), MPFR_RNDU);
        if (span.sgn() < 0) mpfr_set_zero(span.raw(), 1);
        Real t(Enclosure::kRadiusPrec);
        mpfr_mul(t.raw(), span.raw(), d.tail_bound.raw(), MPFR_RNDU);
        numerator = numerator.widened(t);
    }
    Enclosure result = Enclosure::div(numerator, d.F);
    if (all_exact && d.finite_orbit && d.F.has_witness())
        result.set_witness(std::make_shared<const ExactScalar>(
            k.div(total_exact, d.F.witness())));

    Enclosure one_minus_r = Enclosure::sub(Enclosure::from_long(1, p), d.base.inv_beta());
    Enclosure bound = Enclosure::div(Enclosure::sub(cb, ca),
                                     Enclosure::mul(d.F, one_minus_r));
    if (result.lo().cmp(bound.hi()) > 0)
        throw internal_error("interval measure exceeded the density upper bound");
    return result;
}

} // namespace gtakagi
