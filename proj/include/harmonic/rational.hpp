#pragma once

// Exact big-rational arithmetic over GMP. This module is the ground-truth
// oracle for everything else: harmonic numbers H_n = u_n/v_n in lowest terms,
// p-adic valuations of integers and rationals, and range lcms.

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace harmonic {

// Exact-arithmetic index cap. Calls above it are refused so misuse of the
// oracle at scan scale fails loudly; the p-adic engine covers large indices.
inline constexpr std::uint64_t kDefaultIndexCap = 1'000'000;

// A rational in lowest terms with positive denominator.
class ReducedFraction {
public:
    ReducedFraction() : q_(0) {}
    ReducedFraction(mpz_class num, mpz_class den);
    explicit ReducedFraction(const mpz_class& value) : q_(value) {}
    explicit ReducedFraction(long value) : q_(value) {}

    mpz_class numerator() const { return q_.get_num(); }
    mpz_class denominator() const { return q_.get_den(); }
    const mpq_class& raw() const { return q_; }

    bool is_zero() const { return q_ == 0; }
    std::string str() const;

    ReducedFraction& operator+=(const ReducedFraction& o) { q_ += o.q_; return *this; }
    ReducedFraction& operator-=(const ReducedFraction& o) { q_ -= o.q_; return *this; }
    ReducedFraction& operator*=(const ReducedFraction& o) { q_ *= o.q_; return *this; }

    friend ReducedFraction operator+(ReducedFraction a, const ReducedFraction& b) { return a += b; }
    friend ReducedFraction operator-(ReducedFraction a, const ReducedFraction& b) { return a -= b; }
    friend ReducedFraction operator*(ReducedFraction a, const ReducedFraction& b) { return a *= b; }
    friend bool operator==(const ReducedFraction& a, const ReducedFraction& b) { return a.q_ == b.q_; }

private:
    mpq_class q_; // kept canonical: gcd(|num|, den) = 1, den > 0
};

// H_n = 1 + 1/2 + ... + 1/n in lowest terms. n >= 1, n <= index_cap.
ReducedFraction harmonic_number(std::uint64_t n, std::uint64_t index_cap = kDefaultIndexCap);

// Stepwise harmonic numbers: starts at n = 1 with value 1, advance() moves to
// n+1. Exactly equal to harmonic_number(n) at every step.
class HarmonicIterator {
public:
    HarmonicIterator() : n_(1), h_(1) {}

    std::uint64_t index() const { return n_; }
    ReducedFraction value() const;
    const mpq_class& raw() const { return h_; }
    void advance();

private:
    std::uint64_t n_;
    mpq_class h_;
};

// nu_p(a) for a != 0: the largest e with p^e | a.
long nu_int(const mpz_class& a, std::uint64_t p);

// nu_p extended to nonzero rationals: nu_p(num) - nu_p(den). For a reduced
// fraction at most one of the two terms is nonzero.
long nu_rat(const ReducedFraction& q, std::uint64_t p);

// lcm of all integers in [a, b], 1 <= a <= b.
mpz_class lcm_range(std::uint64_t a, std::uint64_t b);

} // namespace harmonic
