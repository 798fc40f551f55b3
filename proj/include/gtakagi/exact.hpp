#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "gtakagi/errors.hpp"

namespace gtakagi {

// Element a + b*beta of Q (b = 0) or of the quadratic field Q(beta).
// The base that interprets the `b` coefficient is carried separately by
// BetaKernel; scalars with b != 0 are only meaningful under the quadratic
// base that produced them.
struct ExactScalar {
    mpq_class a;
    mpq_class b;

    ExactScalar() : a(0), b(0) {}
    explicit ExactScalar(const mpq_class& r) : a(r), b(0) {}
    ExactScalar(const mpq_class& a, const mpq_class& b) : a(a), b(b) {}

    static ExactScalar from_long(long x) { return ExactScalar(mpq_class(x)); }
    bool is_rational() const { return b == 0; }
};

// Parses "p/q", an integer, or a finite decimal into an exact rational.
inline std::optional<mpq_class> parse_rational(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        try {
            mpq_class q(s, 10);
            q.canonicalize();
            if (q.get_den() == 0) return std::nullopt;
            return q;
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    }
    auto dot = s.find('.');
    std::string digits = s;
    long frac_len = 0;
    if (dot != std::string::npos) {
        frac_len = static_cast<long>(s.size() - dot - 1);
        digits = s.substr(0, dot) + s.substr(dot + 1);
    }
    if (digits.empty() || digits == "-" || digits == "+") return std::nullopt;
    for (size_t i = 0; i < digits.size(); ++i) {
        char c = digits[i];
        if (i == 0 && (c == '-' || c == '+')) continue;
        if (c < '0' || c > '9') return std::nullopt;
    }
    try {
        mpz_class num(digits, 10);
        mpz_class den(1);
        for (long i = 0; i < frac_len; ++i) den *= 10;
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

// Exact arithmetic and sign decisions for one base beta.
//
// Two kinds of base are supported exactly:
//   rational   beta = p/q                        (covers every decimal input)
//   quadratic  beta = larger root of x^2 = v x + u, integer u, v
// Everything else falls back to ball arithmetic upstream.
class BetaKernel {
public:
    static BetaKernel rational(const mpq_class& beta) {
        BetaKernel k;
        k.quadratic_ = false;
        k.beta_rat_ = beta;
        return k;
    }
    static BetaKernel quadratic(long v, long u) {
        BetaKernel k;
        k.quadratic_ = true;
        k.v_ = v;
        k.u_ = u;
        return k;
    }

    bool is_quadratic() const { return quadratic_; }
    const mpq_class& beta_rational() const { return beta_rat_; }
    long quad_u() const { return u_; }
    long quad_v() const { return v_; }

    // sign of a + b*beta
    int sign(const ExactScalar& x) const {
        if (x.b == 0) return sgn(x.a);
        if (!quadratic_) {
            mpq_class val = x.a + x.b * beta_rat_;
            return sgn(val);
        }
        if (x.b < 0) {
            ExactScalar neg(-x.a, -x.b);
            return -sign(neg);
        }
        // b > 0: sign(a + b*beta) = sign of (beta - t), t = -a/b
        mpq_class t = -x.a / x.b;
        return cmp_beta_to(t);
    }

    int compare(const ExactScalar& x, const ExactScalar& y) const {
        return sign(ExactScalar(x.a - y.a, x.b - y.b));
    }

    bool equal(const ExactScalar& x, const ExactScalar& y) const {
        return x.a == y.a && x.b == y.b;
    }

    ExactScalar add(const ExactScalar& x, const ExactScalar& y) const {
        return {x.a + y.a, x.b + y.b};
    }
    ExactScalar sub(const ExactScalar& x, const ExactScalar& y) const {
        return {x.a - y.a, x.b - y.b};
    }
    ExactScalar neg(const ExactScalar& x) const { return {-x.a, -x.b}; }

    ExactScalar mul(const ExactScalar& x, const ExactScalar& y) const {
        if (!quadratic_) {
            mpq_class xa = x.a + x.b * beta_rat_;
            mpq_class ya = y.a + y.b * beta_rat_;
            return ExactScalar(xa * ya);
        }
        // (a+b B)(c+d B) with B^2 = v B + u
        mpq_class bd = x.b * y.b;
        return {x.a * y.a + bd * u_, x.a * y.b + x.b * y.a + bd * v_};
    }

    ExactScalar mul_beta(const ExactScalar& x) const {
        if (!quadratic_) {
            // rational base: fold any stray b coefficient back into Q
            return ExactScalar((x.a + x.b * beta_rat_) * beta_rat_);
        }
        // (a + b B) B = b u + (a + b v) B
        return {x.b * mpq_class(u_), x.a + x.b * mpq_class(v_)};
    }

    ExactScalar inverse(const ExactScalar& x) const {
        if (!quadratic_ || x.b == 0) {
            mpq_class val = x.b == 0 ? x.a : mpq_class(x.a + x.b * beta_rat_);
            if (val == 0) throw domain_error("exact division by zero");
            return ExactScalar(mpq_class(1) / val);
        }
        // 1/(a+bB) = (a + b v - b B) / (a^2 + a b v - b^2 u)
        mpq_class norm = x.a * x.a + x.a * x.b * v_ - x.b * x.b * u_;
        if (norm == 0) throw domain_error("exact division by zero");
        return {(x.a + x.b * v_) / norm, -x.b / norm};
    }

    ExactScalar div(const ExactScalar& x, const ExactScalar& y) const {
        return mul(x, inverse(y));
    }

    // sign of P + Q*beta for integer P, Q (quadratic bases)
    int sign_integer_pair(const mpz_class& P, const mpz_class& Q) const {
        int sp = mpz_sgn(P.get_mpz_t());
        int sq = mpz_sgn(Q.get_mpz_t());
        if (sq == 0) return sp;
        if (!quadratic_) {
            // fold: P + Q p/q has the sign of P q + Q p
            mpz_class t = P * beta_rat_.get_den() + Q * beta_rat_.get_num();
            return mpz_sgn(t.get_mpz_t());
        }
        if (sq > 0 && sp >= 0) return 1;
        if (sq < 0 && sp <= 0) return -1;
        if (sq < 0) return -sign_integer_pair(mpz_class(-P), mpz_class(-Q));
        // Q > 0, P < 0: compare beta with t = |P|/Q via f(t) = t^2 - v t - u,
        // scaled by Q^2: F = P^2 - v |P| Q - u Q^2
        mpz_class absP = -P;
        mpz_class F = absP * absP - v_ * absP * Q - u_ * Q * Q;
        int fs = mpz_sgn(F.get_mpz_t());
        mpz_class side = 2 * absP - v_ * Q; // sign of 2t - v
        if (fs < 0) return 1;
        if (fs == 0) return mpz_sgn(side.get_mpz_t()) >= 0 ? 0 : 1;
        return mpz_sgn(side.get_mpz_t()) > 0 ? -1 : 1;
    }

    ExactScalar beta() const {
        return quadratic_ ? ExactScalar(mpq_class(0), mpq_class(1))
                          : ExactScalar(beta_rat_);
    }
    ExactScalar inv_beta() const {
        if (!quadratic_) return ExactScalar(mpq_class(1) / beta_rat_);
        // 1/B = (B - v)/u
        return {mpq_class(-v_, u_), mpq_class(1, u_)};
    }

    // beta compared with 1 and 2, used by BetaParam validation
    int cmp_beta_rational(const mpq_class& t) const {
        if (!quadratic_) return -sgn(mpq_class(t - beta_rat_));
        return cmp_beta_to(t);
    }

private:
    static int sgn(const mpq_class& q) { return mpq_sgn(q.get_mpq_t()); }

    // sign of (beta - t) for rational t, beta the larger root of x^2 - v x - u
    int cmp_beta_to(const mpq_class& t) const {
        if (t <= 0) return 1; // beta > 1 > 0 >= t
        mpq_class f = t * t - mpq_class(v_) * t - mpq_class(u_);
        int fs = sgn(f);
        mpq_class two_t_minus_v = 2 * t - v_;
        if (fs < 0) return 1;              // t strictly between the roots
        if (fs == 0) {
            // t is a root; the larger root iff 2t >= v
            return sgn(two_t_minus_v) >= 0 ? 0 : 1;
        }
        return sgn(two_t_minus_v) > 0 ? -1 : 1;
    }

    bool quadratic_ = false;
    mpq_class beta_rat_{2};
    long u_ = 0;
    long v_ = 0;
};

// Digit walker with integer state: the point is (A + B*beta) / D with a
// denominator D that grows only for rational bases (D *= q per step). All
// branch decisions are integer sign tests, so deep walks never pay the
// per-operation gcd that mpq arithmetic would.
class ExactWalker {
public:
    ExactWalker(const BetaKernel& k, const ExactScalar& x) : k_(&k) {
        mpz_class da = x.a.get_den();
        mpz_class db = x.b.get_den();
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), da.get_mpz_t(), db.get_mpz_t());
        D_ = da / g * db;
        A_ = x.a.get_num() * (D_ / da);
        B_ = x.b.get_num() * (D_ / db);
    }

    bool is_zero() const { return A_ == 0 && B_ == 0; }

    // sign of (point - y) for an exact scalar y
    int compare(const ExactScalar& y) const {
        mpz_class scale = y.a.get_den();
        mpz_class db = y.b.get_den();
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), scale.get_mpz_t(), db.get_mpz_t());
        scale = scale / g * db; // lcm of y's denominators
        // sign of scale*(A + B beta) - D*(ya + yb beta)*scale-normalized
        mpz_class P = A_ * scale - D_ * (y.a.get_num() * (scale / y.a.get_den()));
        mpz_class Q = B_ * scale - D_ * (y.b.get_num() * (scale / y.b.get_den()));
        return k_->sign_integer_pair(P, Q);
    }

    // one map step; returns the digit in {0,1,2} (2 only at x=1, beta=2)
    int step() {
        if (k_->is_quadratic()) {
            mpz_class na = k_->quad_u() * B_;
            mpz_class nb = A_ + k_->quad_v() * B_;
            A_ = std::move(na);
            B_ = std::move(nb);
        } else {
            A_ *= k_->beta_rational().get_num();
            B_ = 0;
            D_ *= k_->beta_rational().get_den();
        }
        int digit = 0;
        if (k_->sign_integer_pair(A_ - D_, B_) >= 0) {
            digit = k_->sign_integer_pair(A_ - 2 * D_, B_) >= 0 ? 2 : 1;
            A_ -= digit * D_;
        }
        return digit;
    }

    // current point as a canonical field element (one gcd, on demand)
    ExactScalar value() const {
        mpq_class a(A_, D_);
        a.canonicalize();
        mpq_class b(B_, D_);
        b.canonicalize();
        return {a, b};
    }

private:
    const BetaKernel* k_;
    mpz_class A_, B_, D_;
};

} // namespace gtakagi
