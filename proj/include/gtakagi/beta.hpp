#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "gtakagi/enclosure.hpp"
#include "gtakagi/errors.hpp"
#include "gtakagi/exact.hpp"
#include "gtakagi/real.hpp"

namespace gtakagi {

// Validated base 1 < beta <= 2 together with the working precision of all
// ball arithmetic performed under it. Owns the derived constants every
// module keeps asking for: tight enclosures of beta and 1/beta, log2(beta),
// and the exact kernel used for witness arithmetic.
class BetaParam {
public:
    static BetaParam from_decimal(const std::string& text, long precision_bits) {
        auto q = parse_rational(text);
        if (!q) throw domain_error("cannot parse beta: " + text);
        BetaParam b(BetaKernel::rational(*q), precision_bits, text);
        return b;
    }

    // golden: larger root of x^2 = x + 1; sqrt2 / sqrt3: roots of x^2 = 2, 3
    static BetaParam named(const std::string& name, long precision_bits) {
        if (name == "golden") return quadratic(1, 1, precision_bits, name);
        if (name == "sqrt2") return quadratic(0, 2, precision_bits, name);
        if (name == "sqrt3") return quadratic(0, 3, precision_bits, name);
        // fall through to decimal parsing ("2", "1.5", ...)
        return from_decimal(name, precision_bits);
    }

    static BetaParam quadratic(long v, long u, long precision_bits,
                               const std::string& label = "") {
        BetaKernel k = BetaKernel::quadratic(v, u);
        std::string lbl = label.empty()
                              ? "root(x^2=" + std::to_string(v) + "x+" + std::to_string(u) + ")"
                              : label;
        return BetaParam(k, precision_bits, lbl);
    }

    const BetaKernel& kernel() const { return kernel_; }
    long precision_bits() const { return prec_; }
    const std::string& label() const { return label_; }

    const Enclosure& beta() const { return beta_; }
    const Enclosure& inv_beta() const { return inv_beta_; }
    const ExactScalar& inv_beta_exact() const { return *inv_beta_scalar_; }
    std::shared_ptr<const ExactScalar> inv_beta_witness() const { return inv_beta_scalar_; }

    double log2_beta() const { return log2_beta_; }
    double beta_double() const { return beta_.to_double(); }
    bool is_two() const {
        return !kernel_.is_quadratic() && kernel_.beta_rational() == 2;
    }

    // Precision contract for certified ball orbits: each step multiplies the
    // radius by beta, so depth n consumes about n*log2(beta) bits.
    long required_bits(long depth) const {
        double need = std::ceil(static_cast<double>(depth) * log2_beta_up_);
        return static_cast<long>(need) + 64;
    }
    void check_orbit_precision(long depth) const {
        long need = required_bits(depth);
        if (prec_ < need) throw insufficient_precision(depth, need, prec_);
    }

    // Ball (plus witness) for an exact scalar under this base. Quadratic
    // elements can have conjugate-cancelling coefficients far larger than
    // their value (truncation points do), so the sum a + b*beta is evaluated
    // at increasing precision until the radius reaches ulp scale of the
    // result at the working precision.
    Enclosure enclose(const ExactScalar& x) const {
        if (x.b == 0) {
            Enclosure e = Enclosure::from_rational(x.a, prec_);
            e.set_witness(std::make_shared<const ExactScalar>(x));
            return e;
        }
        if (kernel_.sign(x) == 0) {
            Enclosure e = Enclosure::from_long(0, prec_);
            e.set_witness(std::make_shared<const ExactScalar>(x));
            return e;
        }
        for (long extra = 64;; extra *= 2) {
            mpfr_prec_t pe = prec_ + extra;
            Enclosure beta_e = beta_enclosure_at(pe);
            Enclosure v = Enclosure::add(Enclosure::from_rational(x.a, pe),
                                         Enclosure::mul(Enclosure::from_rational(x.b, pe),
                                                        beta_e));
            bool tight = !v.value().is_zero() &&
                         v.radius().cmp(Real::pow2(v.value().exponent() - prec_, 64)) <= 0;
            if (tight || extra >= (1L << 22)) {
                v.set_witness(std::make_shared<const ExactScalar>(x));
                return v;
            }
        }
    }

private:
    BetaParam(BetaKernel kernel, long precision_bits, std::string label)
        : kernel_(std::move(kernel)), prec_(precision_bits), label_(std::move(label)) {
        if (prec_ < 64) throw domain_error("precision_bits must be >= 64");
        if (kernel_.cmp_beta_rational(1) <= 0)
            throw domain_error("beta must satisfy beta > 1");
        if (kernel_.cmp_beta_rational(2) > 0)
            throw domain_error("beta must satisfy beta <= 2");
        beta_ = make_beta_enclosure();
        inv_beta_scalar_ = std::make_shared<const ExactScalar>(kernel_.inv_beta());
        inv_beta_ = enclose(*inv_beta_scalar_);

        Real l2_up = Real::log2(beta_.hi(), 64, MPFR_RNDU);
        Real l2 = Real::log2(beta_.value(), 64, MPFR_RNDN);
        log2_beta_up_ = mpfr_get_d(l2_up.raw(), MPFR_RNDU);
        log2_beta_ = l2.to_double();
    }

    Enclosure make_beta_enclosure() const { return beta_enclosure_at(prec_); }

    Enclosure beta_enclosure_at(mpfr_prec_t prec) const {
        if (!kernel_.is_quadratic()) {
            Enclosure e = Enclosure::from_rational(kernel_.beta_rational(), prec);
            e.set_witness(std::make_shared<const ExactScalar>(kernel_.beta()));
            return e;
        }
        long u = kernel_.quad_u();
        long v = kernel_.quad_v();
        // beta = (v + sqrt(v^2 + 4u)) / 2 with directed rounding
        Real disc = Real::from_si(v * v + 4 * u, prec + 8);
        Real slo = Real::sqrt(disc, prec, MPFR_RNDD);
        Real shi = Real::sqrt(disc, prec, MPFR_RNDU);
        Real sval = Real::sqrt(disc, prec, MPFR_RNDN);
        Real lo(prec), hi(prec), val(prec);
        mpfr_add_si(lo.raw(), slo.raw(), v, MPFR_RNDD);
        mpfr_div_2ui(lo.raw(), lo.raw(), 1, MPFR_RNDD);
        mpfr_add_si(hi.raw(), shi.raw(), v, MPFR_RNDU);
        mpfr_div_2ui(hi.raw(), hi.raw(), 1, MPFR_RNDU);
        mpfr_add_si(val.raw(), sval.raw(), v, MPFR_RNDN);
        mpfr_div_2ui(val.raw(), val.raw(), 1, MPFR_RNDN);
        Real r1(Enclosure::kRadiusPrec), r2(Enclosure::kRadiusPrec);
        mpfr_sub(r1.raw(), val.raw(), lo.raw(), MPFR_RNDU);
        mpfr_sub(r2.raw(), hi.raw(), val.raw(), MPFR_RNDU);
        Enclosure e(std::move(val), Real::max(r1, r2));
        e.set_witness(std::make_shared<const ExactScalar>(kernel_.beta()));
        return e;
    }

    BetaKernel kernel_;
    long prec_;
    std::string label_;
    Enclosure beta_;
    Enclosure inv_beta_;
    std::shared_ptr<const ExactScalar> inv_beta_scalar_;
    double log2_beta_ = 1.0;
    double log2_beta_up_ = 1.0;
};

} // namespace gtakagi
