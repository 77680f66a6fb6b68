#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harmonic/primes.hpp"
#include "harmonic/rational.hpp"

using namespace harmonic;

TEST_CASE("reduced fractions are canonical") {
    ReducedFraction q(mpz_class(4), mpz_class(-6));
    CHECK(q.numerator() == -2);
    CHECK(q.denominator() == 3);
    CHECK(q.str() == "-2/3");
    CHECK_THROWS_AS(ReducedFraction(mpz_class(1), mpz_class(0)), std::invalid_argument);

    ReducedFraction sum = ReducedFraction(mpz_class(1), mpz_class(6)) +
                          ReducedFraction(mpz_class(1), mpz_class(3));
    CHECK(sum.numerator() == 1);
    CHECK(sum.denominator() == 2);
}

TEST_CASE("harmonic numbers in lowest terms") {
    CHECK(harmonic_number(1).str() == "1/1");
    CHECK(harmonic_number(2).str() == "3/2");
    CHECK(harmonic_number(6).str() == "49/20");
    CHECK_THROWS_AS(harmonic_number(0), std::invalid_argument);
    CHECK_THROWS_AS(harmonic_number(11, 10), std::invalid_argument);
}

TEST_CASE("iterator equals one-shot summation") {
    HarmonicIterator it;
    for (std::uint64_t n = 1; n <= 200; ++n) {
        if (n > 1) it.advance();
        CHECK(it.index() == n);
        CHECK(it.value() == harmonic_number(n));
    }
}

TEST_CASE("denominators are even from n = 2 on") {
    HarmonicIterator it;
    for (std::uint64_t n = 2; n <= 2000; ++n) {
        it.advance();
        CHECK(mpz_even_p(it.value().denominator().get_mpz_t()));
    }
}

TEST_CASE("integer valuations") {
    CHECK(nu_int(mpz_class(12), 2) == 2);
    CHECK(nu_int(mpz_class(12), 3) == 1);
    CHECK(nu_int(mpz_class(7), 5) == 0);
    CHECK(nu_int(mpz_class(-24), 2) == 3);
    CHECK_THROWS_AS(nu_int(mpz_class(0), 2), std::invalid_argument);
    CHECK_THROWS_AS(nu_int(mpz_class(10), 4), std::invalid_argument);
}

TEST_CASE("rational valuations") {
    CHECK(nu_rat(harmonic_number(2), 2) == -1);
    CHECK(nu_rat(harmonic_number(6), 5) == -1);
    CHECK_THROWS_AS(nu_rat(ReducedFraction(), 2), std::invalid_argument);

    // 3 divides the numerator of H_22
    ReducedFraction h22 = harmonic_number(22);
    CHECK(nu_rat(h22, 3) >= 1);
    CHECK(mpz_divisible_ui_p(h22.numerator().get_mpz_t(), 3));
}

TEST_CASE("lcm over ranges") {
    CHECK(lcm_range(1, 1) == 1);
    CHECK(lcm_range(1, 6) == 60);
    CHECK(lcm_range(1, 10) == 2520);
    CHECK(lcm_range(4, 6) == 60);
    CHECK_THROWS_AS(lcm_range(3, 2), std::invalid_argument);
    CHECK_THROWS_AS(lcm_range(0, 2), std::invalid_argument);

    // lcm(1..n) is the product of maximal prime powers <= n
    for (std::uint64_t n : {2ull, 17ull, 64ull, 100ull}) {
        mpz_class expected(1);
        for (std::uint64_t p : primes_upto(n)) {
            mpz_class pk;
            mpz_ui_pow_ui(pk.get_mpz_t(), p, ilog(p, n));
            expected *= pk;
        }
        CHECK(lcm_range(1, n) == expected);
    }
}

TEST_CASE("valuation lower bound and denominator divisibility") {
    HarmonicIterator it;
    for (std::uint64_t n = 1; n <= 300; ++n) {
        if (n > 1) it.advance();
        const mpz_class lcm = lcm_range(1, n);
        CHECK(mpz_divisible_p(lcm.get_mpz_t(), it.value().denominator().get_mpz_t()));
        for (std::uint64_t p : primes_upto(n)) {
            CHECK(nu_rat(it.value(), p) >= -nu_int(lcm, p));
        }
    }
}
