#include <catch2/catch_amalgamated.hpp>

#include <gtakagi/enclosure.hpp>
#include <gtakagi/rng.hpp>

using namespace gtakagi;

namespace {

bool contains_rational(const Enclosure& e, const mpq_class& q) {
    Real v(e.prec() + 64);
    mpfr_set_q(v.raw(), q.get_mpq_t(), MPFR_RNDN); // slack covered below
    // compare against widened endpoints to absorb this conversion's ulp
    Real lo = e.lo();
    Real hi = e.hi();
    mpfr_nextbelow(lo.raw());
    mpfr_nextabove(hi.raw());
    return lo.cmp(v) <= 0 && v.cmp(hi) <= 0;
}

} // namespace

TEST_CASE("exact constructors have zero or ulp-level radius") {
    Enclosure one = Enclosure::from_long(1, 128);
    CHECK(one.zero_radius());
    CHECK(one.has_witness());

    Enclosure half = Enclosure::from_rational(mpq_class(1, 2), 128);
    CHECK(half.zero_radius()); // dyadic: representable exactly

    Enclosure third = Enclosure::from_rational(mpq_class(1, 3), 128);
    CHECK_FALSE(third.zero_radius());
    CHECK(third.radius().cmp(Real::pow2(-120, 64)) < 0);
    CHECK(third.witness().a == mpq_class(1, 3));
}

TEST_CASE("ball arithmetic always contains the exact rational result") {
    CounterRng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        mpq_class qa(static_cast<long>(rng.next_u64() % 2000) - 1000,
                     1 + static_cast<long>(rng.next_u64() % 97));
        mpq_class qb(static_cast<long>(rng.next_u64() % 2000) - 1000,
                     1 + static_cast<long>(rng.next_u64() % 97));
        qa.canonicalize();
        qb.canonicalize();
        Enclosure a = Enclosure::from_rational(qa, 96);
        Enclosure b = Enclosure::from_rational(qb, 96);

        CHECK(contains_rational(Enclosure::add(a, b), qa + qb));
        CHECK(contains_rational(Enclosure::sub(a, b), qa - qb));
        CHECK(contains_rational(Enclosure::mul(a, b), qa * qb));
        if (qb != 0 && (qb > mpq_class(1, 1000) || qb < mpq_class(-1, 1000)))
            CHECK(contains_rational(Enclosure::div(a, b), qa / qb));
    }
}

TEST_CASE("division by an enclosure containing zero is rejected") {
    Enclosure a = Enclosure::from_long(1, 96);
    Enclosure z(Real::from_double(1e-30, 96), Real::from_double(1e-20, 64));
    CHECK_THROWS_AS(Enclosure::div(a, z), domain_error);
}

TEST_CASE("pow_si and pow_alpha bracket the true value") {
    Enclosure b(Real::from_double(1.5, 128), Real::from_double(1e-20, 64));
    Enclosure p3 = Enclosure::pow_si(b, 3);
    CHECK(contains_rational(p3, mpq_class(27, 8)));
    Enclosure pm2 = Enclosure::pow_si(b, -2);
    CHECK(contains_rational(pm2, mpq_class(4, 9)));

    Enclosure q = Enclosure::from_rational(mpq_class(1, 4), 128);
    Enclosure r = Enclosure::pow_alpha(q, 0.5);
    CHECK(contains_rational(r, mpq_class(1, 2)));
    CHECK(r.radius().cmp(Real::pow2(-100, 64)) < 0);
}

TEST_CASE("pow_alpha rejects certainly-negative enclosures") {
    Enclosure neg(Real::from_double(-2.0, 96), Real::from_double(0.5, 64));
    CHECK_THROWS_AS(Enclosure::pow_alpha(neg, 0.5), domain_error);
}

TEST_CASE("widened adds analytic slack and drops the witness") {
    Enclosure e = Enclosure::from_long(2, 96);
    Enclosure w = e.widened(Real::pow2(-10, 64));
    CHECK_FALSE(w.has_witness());
    CHECK(w.radius().cmp(Real::pow2(-10, 64)) >= 0);
    CHECK(contains_rational(w, mpq_class(2)));
}

TEST_CASE("certified comparisons need disjoint enclosures") {
    Enclosure a(Real::from_double(1.0, 96), Real::from_double(0.1, 64));
    Enclosure b(Real::from_double(1.05, 96), Real::from_double(0.01, 64));
    CHECK(a.overlaps(b));
    CHECK_FALSE(Enclosure::certainly_lt(a, b));
    Enclosure c(Real::from_double(2.0, 96), Real::from_double(0.01, 64));
    CHECK(Enclosure::certainly_lt(a, c));
}

TEST_CASE("decimal strings are deterministic and tagged with the exponent") {
    Real x = Real::from_double(0.15625, 128); // 5/32, exact dyadic
    CHECK(x.to_decimal_string() == Real::from_double(0.15625, 128).to_decimal_string());
    CHECK(Real::from_si(0, 64).to_decimal_string() == "0");
    CHECK(Real::from_si(1, 64).to_decimal_string() == "1e0");
    CHECK(Real::from_si(-2, 64).to_decimal_string() == "-2e0");
}
