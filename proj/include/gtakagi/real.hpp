#pragma once

#include <mpfr.h>

#include <cstdint>
#include <string>
#include <utility>

#include "gtakagi/errors.hpp"

namespace gtakagi {

// RAII wrapper around mpfr_t with explicit precision and rounding on every
// operation. No global default precision is ever consulted, so values are
// safe to build and combine concurrently.
class Real {
public:
    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Real() : Real(64) {}

    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Real(Real&& o) noexcept {
        mpfr_init2(v_, 64);
        mpfr_swap(v_, o.v_);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    static Real from_si(long x, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_si(r.v_, x, MPFR_RNDN); // exact for |x| < 2^prec
        return r;
    }
    // 2^e
    static Real pow2(long e, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
        return r;
    }
    static Real from_double(double x, mpfr_prec_t prec) {
        Real r(prec);
        mpfr_set_d(r.v_, x, MPFR_RNDN);
        return r;
    }
    // Returns the parsed value and whether the conversion was exact.
    static std::pair<Real, bool> from_string(const std::string& s, mpfr_prec_t prec,
                                             mpfr_rnd_t rnd = MPFR_RNDN) {
        Real r(prec);
        mpfr_clear_inexflag();
        int t = mpfr_set_str(r.v_, s.c_str(), 10, rnd);
        if (t == -1) throw domain_error("cannot parse real literal: " + s);
        return {std::move(r), mpfr_inexflag_p() == 0};
    }

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_neg() const { return mpfr_sgn(v_) < 0; }
    int sgn() const { return mpfr_sgn(v_); }
    int cmp(const Real& o) const { return mpfr_cmp(v_, o.v_); }
    int cmp_si(long x) const { return mpfr_cmp_si(v_, x); }
    bool operator<(const Real& o) const { return cmp(o) < 0; }
    bool operator<=(const Real& o) const { return cmp(o) <= 0; }
    bool operator==(const Real& o) const { return cmp(o) == 0; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long exponent() const { return mpfr_get_exp(v_); } // valid for nonzero values

    // One ulp of this value at its own precision: 2^(exp - prec + 1).
    // Zero values get the smallest representable slack for `ref_exp`.
    Real ulp() const {
        Real r(32);
        if (is_zero())
            mpfr_set_zero(r.v_, 1);
        else
            mpfr_set_ui_2exp(r.v_, 1, exponent() - prec() + 1, MPFR_RNDU);
        return r;
    }

    // --- arithmetic with explicit target precision and rounding -----------

    static Real add(const Real& a, const Real& b, mpfr_prec_t p, mpfr_rnd_t r) {
        Real out(p); mpfr_add(out.v_, a.v_, b.v_, r); return out;
    }
    static Real sub(const Real& a, const Real& b, mpfr_prec_t p, mpfr_rnd_t r) {
        Real out(p); mpfr_sub(out.v_, a.v_, b.v_, r); return out;
    }
    static Real mul(const Real& a, const Real& b, mpfr_prec_t p, mpfr_rnd_t r) {
        Real out(p); mpfr_mul(out.v_, a.v_, b.v_, r); return out;
    }
    static Real div(const Real& a, const Real& b, mpfr_prec_t p, mpfr_rnd_t r) {
        Real out(p); mpfr_div(out.v_, a.v_, b.v_, r); return out;
    }
    static Real neg(const Real& a) {
        Real out(a.prec()); mpfr_neg(out.v_, a.v_, MPFR_RNDN); return out;
    }
    static Real abs(const Real& a) {
        Real out(a.prec()); mpfr_abs(out.v_, a.v_, MPFR_RNDN); return out;
    }
    static Real floor(const Real& a) {
        Real out(a.prec()); mpfr_floor(out.v_, a.v_); return out;
    }
    static Real min(const Real& a, const Real& b) { return a.cmp(b) <= 0 ? a : b; }
    static Real max(const Real& a, const Real& b) { return a.cmp(b) >= 0 ? a : b; }
    static Real mul_2si(const Real& a, long e) {
        Real out(a.prec()); mpfr_mul_2si(out.v_, a.v_, e, MPFR_RNDN); return out;
    }
    static Real pow_si(const Real& a, long e, mpfr_prec_t p, mpfr_rnd_t r) {
        Real out(p); mpfr_pow_si(out.v_, a.v_, e, r); return out;
    }
    static Real sqrt(const Real& a, mpfr_prec_t p, mpfr_rnd_t r) {
        Real out(p); mpfr_sqrt(out.v_, a.v_, r); return out;
    }
    static Real log(const Real& a, mpfr_prec_t p, mpfr_rnd_t r) {
        Real out(p); mpfr_log(out.v_, a.v_, r); return out;
    }
    static Real log2(const Real& a, mpfr_prec_t p, mpfr_rnd_t r) {
        Real out(p); mpfr_log2(out.v_, a.v_, r); return out;
    }

    // Decimal string carrying the full working precision; deterministic for
    // a fixed value, so reports are byte-stable. Format: -d.dddde[+-]xx
    std::string to_decimal_string() const {
        if (mpfr_nan_p(v_)) return "nan";
        if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
        if (is_zero()) return "0";
        // ceil(prec * log10(2)) + 2 digits guarantee round-trip
        size_t digits = static_cast<size_t>(static_cast<double>(prec()) * 0.30103) + 3;
        mpfr_exp_t e;
        char* s = mpfr_get_str(nullptr, &e, 10, digits, v_, MPFR_RNDN);
        std::string m(s);
        mpfr_free_str(s);
        bool neg = !m.empty() && m[0] == '-';
        std::string digs = neg ? m.substr(1) : m;
        // strip trailing zeros but keep at least one digit
        size_t last = digs.find_last_not_of('0');
        digs = digs.substr(0, last == std::string::npos ? 1 : last + 1);
        std::string out = (neg ? "-" : "");
        out += digs.substr(0, 1);
        if (digs.size() > 1) out += "." + digs.substr(1);
        out += "e" + std::to_string(static_cast<long>(e) - 1);
        return out;
    }

private:
    mpfr_t v_;
};

} // namespace gtakagi
