#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gtakagi/beta.hpp"
#include "gtakagi/enclosure.hpp"
#include "gtakagi/errors.hpp"
#include "gtakagi/exact.hpp"

namespace gtakagi {

enum class Trilean { yes, no, unknown };

inline const char* to_string(Trilean t) {
    switch (t) {
        case Trilean::yes: return "yes";
        case Trilean::no: return "no";
        default: return "unknown";
    }
}

enum class DigitSource { computed_from_point, user_supplied };

// Finite prefix g_1..g_n of a greedy digit sequence.
struct GreedyDigits {
    BetaParam base;
    std::vector<int> digits;
    DigitSource source = DigitSource::computed_from_point;
    bool certified = false;

    long depth() const { return static_cast<long>(digits.size()); }
};

// tau^0(x) .. tau^n(x) with the digits read along the way. If a branch
// decision could not be certified the trace stops there and ambiguous_at
// holds the failing digit index (1-based).
struct OrbitTrace {
    BetaParam base;
    Enclosure x0;
    std::vector<Enclosure> points;
    std::vector<int> digits;
    std::optional<long> ambiguous_at;
    bool certified = false;
};

namespace detail {

// Clips a ball to [0,1]; throws if it lies entirely outside.
inline Enclosure clip_unit(const Enclosure& x) {
    Real lo = x.lo();
    Real hi = x.hi();
    if (hi.sgn() < 0 || lo.cmp_si(1) > 0)
        throw domain_error("point outside [0,1] beyond its radius");
    if (lo.sgn() >= 0 && hi.cmp_si(1) <= 0) return x;
    mpfr_prec_t p = x.prec();
    Real nlo = lo.sgn() < 0 ? Real::from_si(0, p) : lo;
    Real nhi = hi.cmp_si(1) > 0 ? Real::from_si(1, p) : hi;
    Real mid = Real::mul_2si(Real::add(nlo, nhi, p, MPFR_RNDN), -1);
    Real r1(Enclosure::kRadiusPrec), r2(Enclosure::kRadiusPrec);
    mpfr_sub(r1.raw(), mid.raw(), nlo.raw(), MPFR_RNDU);
    mpfr_sub(r2.raw(), nhi.raw(), mid.raw(), MPFR_RNDU);
    Enclosure e(std::move(mid), Real::max(r1, r2));
    if (x.has_witness()) e.set_witness(x.witness_ptr());
    return e;
}

// One exact map step in place; returns the digit [beta x] in {0,1,2}
// (2 only for x = 1 at beta = 2).
inline int exact_map_step(const BetaKernel& k, ExactScalar& x) {
    ExactScalar y = k.mul_beta(x);
    ExactScalar one = ExactScalar::from_long(1);
    int digit;
    if (k.compare(y, one) < 0) {
        digit = 0;
    } else {
        ExactScalar two = ExactScalar::from_long(2);
        digit = k.compare(y, two) < 0 ? 1 : 2;
        if (digit == 2 && k.compare(y, two) != 0)
            throw domain_error("orbit left [0,1]");
    }
    x = digit == 0 ? y : k.sub(y, ExactScalar::from_long(digit));
    return digit;
}

struct BallStep {
    Enclosure next;
    int digit;
};

// One certified ball step; throws ambiguous_branch when the digit cannot
// be decided at the current radius.
inline BallStep ball_map_step(const BetaParam& base, const Enclosure& x, long index) {
    Enclosure y = Enclosure::mul(base.beta(), x);
    Real flo = Real::floor(y.lo());
    Real fhi = Real::floor(y.hi());
    if (flo.cmp(fhi) != 0) throw ambiguous_branch(index);
    long digit = static_cast<long>(flo.to_double());
    if (digit < 0 || digit > 2) throw domain_error("orbit left [0,1]");
    Enclosure next = digit == 0
                         ? y
                         : Enclosure::sub(y, Enclosure::from_long(digit, y.prec()));
    next.drop_witness();
    return {std::move(next), static_cast<int>(digit)};
}

inline bool witness_is_one(const Enclosure& x) {
    if (x.has_witness())
        return x.witness().b == 0 && x.witness().a == 1;
    return x.zero_radius() && x.value().cmp_si(1) == 0;
}

// Checks r_k <= beta^k (r_0 + k * 2^(5-prec)) along a certified trace.
inline void assert_radius_law(const BetaParam& base, const OrbitTrace& t) {
    if (t.points.empty()) return;
    Real beta_hi = base.beta().hi();
    Real pow(Enclosure::kRadiusPrec);
    mpfr_set_ui(pow.raw(), 1, MPFR_RNDU);
    Real slack = Real::pow2(5 - static_cast<long>(base.precision_bits()),
                            Enclosure::kRadiusPrec);
    const Real& r0 = t.points.front().radius();
    for (size_t k = 1; k < t.points.size(); ++k) {
        mpfr_mul(pow.raw(), pow.raw(), beta_hi.raw(), MPFR_RNDU);
        Real budget(Enclosure::kRadiusPrec);
        mpfr_mul_ui(budget.raw(), slack.raw(), static_cast<unsigned long>(k), MPFR_RNDU);
        mpfr_add(budget.raw(), budget.raw(), r0.raw(), MPFR_RNDU);
        mpfr_mul(budget.raw(), budget.raw(), pow.raw(), MPFR_RNDU);
        if (t.points[k].radius().cmp(budget) > 0)
            throw internal_error("orbit radius grew faster than beta^k law");
    }
}

} // namespace detail

// The beta-map tau(x) = beta x - [beta x]. Map semantics: at x = 1, beta = 2
// the integer part is 2 and the image is 0. (Greedy digit extraction handles
// that corner separately; see digits().)
inline Enclosure tau(const BetaParam& base, const Enclosure& x) {
    Enclosure cx = detail::clip_unit(x);
    if (cx.has_witness()) {
        ExactScalar w = cx.witness();
        if (base.kernel().sign(w) < 0 ||
            base.kernel().compare(w, ExactScalar::from_long(1)) > 0)
            throw domain_error("point outside [0,1]");
        detail::exact_map_step(base.kernel(), w);
        return base.enclose(w);
    }
    return detail::ball_map_step(base, cx, 1).next;
}

// Greedy orbit of length n+1 with digits g_1..g_n. For exact inputs every
// step is decided in the field and the trace is always certified; for plain
// balls the precision contract is enforced up front and an undecidable
// branch stops the trace with ambiguous_at set.
inline OrbitTrace orbit(const BetaParam& base, const Enclosure& x, long n) {
    if (n < 0) throw domain_error("orbit depth must be >= 0");
    OrbitTrace t{base, x, {}, {}, std::nullopt, true};
    t.points.reserve(static_cast<size_t>(n) + 1);
    t.digits.reserve(static_cast<size_t>(n));
    Enclosure cur = detail::clip_unit(x);

    // expansion of 1 at beta = 2: the constant-1 digit sequence
    if (base.is_two() && detail::witness_is_one(cur)) {
        for (long k = 0; k <= n; ++k) {
            t.points.push_back(cur);
            if (k < n) t.digits.push_back(1);
        }
        return t;
    }

    if (cur.has_witness()) {
        const BetaKernel& k = base.kernel();
        const ExactScalar& w = cur.witness();
        if (k.sign(w) < 0 || k.compare(w, ExactScalar::from_long(1)) > 0)
            throw domain_error("point outside [0,1]");
        ExactWalker walk(k, w);
        t.points.push_back(cur);
        for (long i = 1; i <= n; ++i) {
            int digit = walk.step();
            if (digit == 2) throw internal_error("digit 2 outside the x=1, beta=2 corner");
            t.digits.push_back(digit);
            t.points.push_back(base.enclose(walk.value()));
        }
        return t;
    }

    base.check_orbit_precision(n);
    t.points.push_back(cur);
    for (long i = 1; i <= n; ++i) {
        try {
            auto step = detail::ball_map_step(base, cur, i);
            if (step.digit == 2) throw ambiguous_branch(i);
            t.digits.push_back(step.digit);
            cur = std::move(step.next);
            t.points.push_back(cur);
        } catch (const ambiguous_branch& e) {
            t.ambiguous_at = e.index;
            t.certified = false;
            break;
        }
    }
    detail::assert_radius_law(base, t);
    return t;
}

// First n greedy digits of x. Throws ambiguous_branch if the full prefix
// cannot be certified.
inline GreedyDigits digits(const BetaParam& base, const Enclosure& x, long n) {
    if (n < 0) throw domain_error("digit depth must be >= 0");
    Enclosure cx = detail::clip_unit(x);
    if (base.is_two() && detail::witness_is_one(cx))
        return {base, std::vector<int>(static_cast<size_t>(n), 1),
                DigitSource::computed_from_point, true};
    if (cx.has_witness()) {
        const BetaKernel& k = base.kernel();
        const ExactScalar& w = cx.witness();
        if (k.sign(w) < 0 || k.compare(w, ExactScalar::from_long(1)) > 0)
            throw domain_error("point outside [0,1]");
        ExactWalker walk(k, w);
        std::vector<int> d;
        d.reserve(static_cast<size_t>(n));
        for (long i = 1; i <= n; ++i) {
            int digit = walk.step();
            if (digit == 2) throw internal_error("digit 2 outside the x=1, beta=2 corner");
            d.push_back(digit);
        }
        return {base, std::move(d), DigitSource::computed_from_point, true};
    }
    OrbitTrace t = orbit(base, cx, n);
    if (!t.certified) throw ambiguous_branch(*t.ambiguous_at);
    return {base, t.digits, DigitSource::computed_from_point, true};
}

// Sum_{k<=depth} d_k beta^{-k}: the exact truncation point of a digit
// prefix. The result carries only representation slack in its radius (no
// digit tail is implied).
inline Enclosure synthesize(const BetaParam& base, const std::vector<int>& d) {
    const BetaKernel& k = base.kernel();
    ExactScalar inv = k.inv_beta();
    ExactScalar acc = ExactScalar::from_long(0);
    for (auto it = d.rbegin(); it != d.rend(); ++it) {
        if (*it != 0 && *it != 1) throw domain_error("digits must lie in {0,1}");
        if (*it == 1) acc = k.add(acc, ExactScalar::from_long(1));
        acc = k.mul(acc, inv);
    }
    return base.enclose(acc);
}

inline Enclosure synthesize(const BetaParam& base, const GreedyDigits& d) {
    return synthesize(base, d.digits);
}

// Round-trip validation for user-supplied digit lists: the greedy digits of
// the synthesized point must regenerate the list.
inline bool validate_user_digits(const BetaParam& base, const std::vector<int>& d) {
    Enclosure x = synthesize(base, d);
    GreedyDigits g = digits(base, x, static_cast<long>(d.size()));
    return g.digits == d;
}

// N(x,y): first index where the greedy digits differ, or nullopt if they
// agree through max_depth. Digit extraction proceeds lazily, so separation
// found early never pays for the full depth.
inline std::optional<long> separation_time(const BetaParam& base, const Enclosure& x,
                                           const Enclosure& y, long max_depth) {
    if (max_depth < 1) throw domain_error("max_depth must be >= 1");
    if (x.has_witness() && y.has_witness() &&
        base.kernel().equal(x.witness(), y.witness()))
        throw domain_error("separation_time requires x != y");

    Enclosure cx = detail::clip_unit(x);
    Enclosure cy = detail::clip_unit(y);
    bool exact = cx.has_witness() && cy.has_witness();
    if (exact) {
        const BetaKernel& k = base.kernel();
        ExactWalker wx(k, cx.witness());
        ExactWalker wy(k, cy.witness());
        bool x_is_one = base.is_two() && detail::witness_is_one(cx);
        bool y_is_one = base.is_two() && detail::witness_is_one(cy);
        for (long i = 1; i <= max_depth; ++i) {
            int dx = x_is_one ? 1 : wx.step();
            int dy = y_is_one ? 1 : wy.step();
            if (dx != dy) return i;
        }
        return std::nullopt;
    }

    if (!Enclosure::certainly_lt(cx, cy) && !Enclosure::certainly_lt(cy, cx))
        throw domain_error("separation_time requires disjoint enclosures");
    Enclosure ax = cx;
    Enclosure ay = cy;
    long budget = static_cast<long>(
        (static_cast<double>(base.precision_bits()) - 64.0) / base.log2_beta());
    for (long i = 1; i <= max_depth; ++i) {
        if (i > budget) throw insufficient_precision(i, base.required_bits(i),
                                                     base.precision_bits());
        auto sx = detail::ball_map_step(base, ax, i);
        auto sy = detail::ball_map_step(base, ay, i);
        if (sx.digit != sy.digit) return i;
        ax = std::move(sx.next);
        ay = std::move(sy.next);
    }
    return std::nullopt;
}

// Simple means the orbit hits 1/beta exactly, after which every digit is 0.
// Exact inputs decide this in the field; plain balls answer yes only on a
// pinned (radius-0) hit, unknown when an enclosure merely contains 1/beta.
inline Trilean is_simple(const BetaParam& base, const Enclosure& x, long depth) {
    if (depth < 1) throw domain_error("depth must be >= 1");
    Enclosure cx = detail::clip_unit(x);
    if (base.is_two() && detail::witness_is_one(cx)) return Trilean::no;
    const BetaKernel& k = base.kernel();
    if (cx.has_witness()) {
        const ExactScalar& w = cx.witness();
        if (k.sign(w) < 0 || k.compare(w, ExactScalar::from_long(1)) > 0)
            throw domain_error("point outside [0,1]");
        ExactWalker walk(k, w);
        const ExactScalar& target = base.inv_beta_exact();
        for (long i = 0; i < depth; ++i) {
            if (walk.compare(target) == 0) return Trilean::yes;
            if (walk.is_zero()) return Trilean::no; // stuck at the fixed point 0
            walk.step();
        }
        return Trilean::no;
    }
    Enclosure cur = cx;
    const Enclosure& target = base.inv_beta();
    for (long i = 0; i < depth; ++i) {
        if (cur.zero_radius() && target.zero_radius() &&
            cur.value().cmp(target.value()) == 0)
            return Trilean::yes;
        if (cur.overlaps(target)) return Trilean::unknown;
        if (cur.zero_radius() && cur.value().is_zero()) return Trilean::no;
        try {
            cur = detail::ball_map_step(base, cur, i + 1).next;
        } catch (const ambiguous_branch&) {
            return Trilean::unknown;
        } catch (const insufficient_precision&) {
            return Trilean::unknown;
        }
    }
    return Trilean::no;
}

} // namespace gtakagi
