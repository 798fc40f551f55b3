#pragma once

#include <memory>
#include <string>
#include <utility>

#include "gtakagi/errors.hpp"
#include "gtakagi/exact.hpp"
#include "gtakagi/real.hpp"

namespace gtakagi {

// A certified value: |true - value| <= radius, always. Radii are kept at a
// small fixed precision and every radius operation rounds up, so the bound
// survives arbitrary composition.
//
// An enclosure may additionally carry an exact witness: the element of Q or
// Q(beta) that the value rounds. Witnesses are what make exact branch
// decisions (and exact simple-number detection) possible downstream; plain
// balls work everywhere but answer some questions with "unknown".
class Enclosure {
public:
    static constexpr mpfr_prec_t kRadiusPrec = 64;

    Enclosure() : value_(64), radius_(kRadiusPrec) {}
    Enclosure(Real value, Real radius)
        : value_(std::move(value)), radius_(std::move(radius)) {
        if (radius_.is_neg()) throw internal_error("negative enclosure radius");
    }

    static Enclosure from_long(long k, mpfr_prec_t prec) {
        Enclosure e(Real::from_si(k, prec), zero_rad());
        e.exact_ = std::make_shared<const ExactScalar>(ExactScalar::from_long(k));
        return e;
    }

    // Exact rational; the ball covers the conversion rounding and the witness
    // remembers the true value.
    static Enclosure from_rational(const mpq_class& q, mpfr_prec_t prec) {
        Real v(prec);
        int t = mpfr_set_q(v.raw(), q.get_mpq_t(), MPFR_RNDN);
        Real r = t == 0 ? zero_rad() : v.ulp();
        Enclosure e(std::move(v), std::move(r));
        e.exact_ = std::make_shared<const ExactScalar>(ExactScalar(q));
        return e;
    }

    static Enclosure from_ball(Real value, Real radius) {
        return Enclosure(std::move(value), std::move(radius));
    }

    const Real& value() const { return value_; }
    const Real& radius() const { return radius_; }
    mpfr_prec_t prec() const { return value_.prec(); }

    bool has_witness() const { return exact_ != nullptr; }
    const ExactScalar& witness() const {
        if (!exact_) throw internal_error("enclosure has no exact witness");
        return *exact_;
    }
    std::shared_ptr<const ExactScalar> witness_ptr() const { return exact_; }
    void set_witness(std::shared_ptr<const ExactScalar> w) { exact_ = std::move(w); }
    void drop_witness() { exact_.reset(); }

    bool zero_radius() const { return radius_.is_zero(); }

    Real lo() const {
        Real r(value_.prec());
        mpfr_sub(r.raw(), value_.raw(), radius_.raw(), MPFR_RNDD);
        return r;
    }
    Real hi() const {
        Real r(value_.prec());
        mpfr_add(r.raw(), value_.raw(), radius_.raw(), MPFR_RNDU);
        return r;
    }

    double to_double() const { return value_.to_double(); }

    // --- certified predicates ---------------------------------------------

    bool contains(const Real& x) const { return lo().cmp(x) <= 0 && x.cmp(hi()) <= 0; }
    bool overlaps(const Enclosure& o) const {
        return lo().cmp(o.hi()) <= 0 && o.lo().cmp(hi()) <= 0;
    }
    static bool certainly_lt(const Enclosure& a, const Enclosure& b) {
        return a.hi().cmp(b.lo()) < 0;
    }
    static bool certainly_le(const Enclosure& a, const Enclosure& b) {
        return a.hi().cmp(b.lo()) <= 0;
    }

    // --- ball arithmetic (witnesses are not propagated here) ---------------

    static Enclosure add(const Enclosure& a, const Enclosure& b) {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        Real v(p);
        int t = mpfr_add(v.raw(), a.value_.raw(), b.value_.raw(), MPFR_RNDN);
        Real r = radius_sum(a.radius_, b.radius_, t ? v.ulp() : zero_rad());
        return Enclosure(std::move(v), std::move(r));
    }

    static Enclosure sub(const Enclosure& a, const Enclosure& b) {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        Real v(p);
        int t = mpfr_sub(v.raw(), a.value_.raw(), b.value_.raw(), MPFR_RNDN);
        Real r = radius_sum(a.radius_, b.radius_, t ? v.ulp() : zero_rad());
        return Enclosure(std::move(v), std::move(r));
    }

    static Enclosure mul(const Enclosure& a, const Enclosure& b) {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        Real v(p);
        int t = mpfr_mul(v.raw(), a.value_.raw(), b.value_.raw(), MPFR_RNDN);
        // |v - xy| <= slack + |a.v| rb + |b.v| ra + ra rb
        Real r(kRadiusPrec);
        mpfr_t tmp;
        mpfr_init2(tmp, kRadiusPrec);
        mpfr_mul(tmp, a.value_.raw(), b.radius_.raw(), MPFR_RNDU);
        mpfr_abs(tmp, tmp, MPFR_RNDU);
        mpfr_set(r.raw(), tmp, MPFR_RNDU);
        mpfr_mul(tmp, b.value_.raw(), a.radius_.raw(), MPFR_RNDU);
        mpfr_abs(tmp, tmp, MPFR_RNDU);
        mpfr_add(r.raw(), r.raw(), tmp, MPFR_RNDU);
        mpfr_mul(tmp, a.radius_.raw(), b.radius_.raw(), MPFR_RNDU);
        mpfr_add(r.raw(), r.raw(), tmp, MPFR_RNDU);
        if (t) mpfr_add(r.raw(), r.raw(), v.ulp().raw(), MPFR_RNDU);
        mpfr_clear(tmp);
        return Enclosure(std::move(v), std::move(r));
    }

    // Requires b bounded away from zero: |b.value| > b.radius.
    static Enclosure div(const Enclosure& a, const Enclosure& b) {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        Real babs = Real::abs(b.value_);
        if (babs.cmp(b.radius_) <= 0)
            throw domain_error("division by an enclosure containing zero");
        Real v(p);
        int t = mpfr_div(v.raw(), a.value_.raw(), b.value_.raw(), MPFR_RNDN);
        // |v - x/y| <= slack + (ra + |v| rb) / (|b.v| - rb)
        Real r(kRadiusPrec);
        mpfr_t tmp, den;
        mpfr_init2(tmp, kRadiusPrec);
        mpfr_init2(den, kRadiusPrec);
        mpfr_mul(tmp, v.raw(), b.radius_.raw(), MPFR_RNDU);
        mpfr_abs(tmp, tmp, MPFR_RNDU);
        mpfr_add(tmp, tmp, a.radius_.raw(), MPFR_RNDU);
        mpfr_sub(den, babs.raw(), b.radius_.raw(), MPFR_RNDD);
        mpfr_div(r.raw(), tmp, den, MPFR_RNDU);
        if (t) mpfr_add(r.raw(), r.raw(), v.ulp().raw(), MPFR_RNDU);
        mpfr_clear(tmp);
        mpfr_clear(den);
        return Enclosure(std::move(v), std::move(r));
    }

    static Enclosure neg(const Enclosure& a) {
        Enclosure e(Real::neg(a.value_), a.radius_);
        return e;
    }

    static Enclosure abs(const Enclosure& a) {
        // |.| is 1-Lipschitz, so the same radius certifies the result
        return Enclosure(Real::abs(a.value_), a.radius_);
    }

    // x^alpha on a certainly-nonnegative enclosure (lo clamped at 0).
    static Enclosure pow_alpha(const Enclosure& a, double alpha) {
        mpfr_prec_t p = a.prec();
        Real l = a.lo();
        if (l.is_neg()) {
            if (a.hi().is_neg()) throw domain_error("pow_alpha on negative enclosure");
            l = Real::from_si(0, p);
        }
        Real h = a.hi();
        Real al = Real::from_double(alpha, 64);
        Real vlo(p), vhi(p), v(p);
        mpfr_pow(vlo.raw(), l.raw(), al.raw(), MPFR_RNDD);
        mpfr_pow(vhi.raw(), h.raw(), al.raw(), MPFR_RNDU);
        mpfr_pow(v.raw(), a.value_.raw(), al.raw(), MPFR_RNDN);
        return from_interval(std::move(v), vlo, vhi);
    }

    // Integer power of a certainly-positive enclosure.
    static Enclosure pow_si(const Enclosure& a, long e) {
        mpfr_prec_t p = a.prec();
        if (e == 0) return from_long(1, p);
        Real l = a.lo();
        Real h = a.hi();
        if (l.sgn() <= 0) throw domain_error("pow_si base must be positive");
        Real vlo(p), vhi(p), v(p);
        if (e > 0) {
            mpfr_pow_si(vlo.raw(), l.raw(), e, MPFR_RNDD);
            mpfr_pow_si(vhi.raw(), h.raw(), e, MPFR_RNDU);
        } else {
            mpfr_pow_si(vlo.raw(), h.raw(), e, MPFR_RNDD);
            mpfr_pow_si(vhi.raw(), l.raw(), e, MPFR_RNDU);
        }
        mpfr_pow_si(v.raw(), a.value_.raw(), e, MPFR_RNDN);
        return from_interval(std::move(v), vlo, vhi);
    }

    // Adds an analytic error term (tail bound etc.) to the radius.
    Enclosure widened(const Real& extra) const {
        if (extra.is_neg()) throw internal_error("negative widening");
        Enclosure e = *this;
        mpfr_add(e.radius_.raw(), e.radius_.raw(), extra.raw(), MPFR_RNDU);
        e.exact_.reset();
        return e;
    }

    std::string to_string() const {
        return value_.to_decimal_string() + " +/- " + radius_.to_decimal_string();
    }

private:
    static Real zero_rad() {
        Real r(kRadiusPrec);
        return r;
    }

    static Real radius_sum(const Real& a, const Real& b, const Real& slack) {
        Real r(kRadiusPrec);
        mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDU);
        mpfr_add(r.raw(), r.raw(), slack.raw(), MPFR_RNDU);
        return r;
    }

    // Ball centered at v covering [lo, hi].
    static Enclosure from_interval(Real v, const Real& lo, const Real& hi) {
        Real r1(kRadiusPrec), r2(kRadiusPrec);
        mpfr_sub(r1.raw(), v.raw(), lo.raw(), MPFR_RNDU);
        mpfr_sub(r2.raw(), hi.raw(), v.raw(), MPFR_RNDU);
        if (r1.is_neg()) mpfr_set_zero(r1.raw(), 1);
        if (r2.is_neg()) mpfr_set_zero(r2.raw(), 1);
        return Enclosure(std::move(v), Real::max(r1, r2));
    }

    Real value_;
    Real radius_;
    std::shared_ptr<const ExactScalar> exact_;
};

} // namespace gtakagi
