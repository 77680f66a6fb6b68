#include "harmonic/rational.hpp"

#include <stdexcept>

#include "harmonic/primes.hpp"

namespace harmonic {

ReducedFraction::ReducedFraction(mpz_class num, mpz_class den) {
    if (den == 0) throw std::invalid_argument("ReducedFraction: zero denominator");
    q_ = mpq_class(std::move(num), std::move(den));
    q_.canonicalize();
}

std::string ReducedFraction::str() const {
    return numerator().get_str() + "/" + denominator().get_str();
}

namespace {

// Reciprocal sum over [lo, hi] by halving; every combine is an exact
// canonical mpq addition.
mpq_class reciprocal_sum(std::uint64_t lo, std::uint64_t hi) {
    if (hi - lo < 32) {
        mpq_class acc(0);
        for (std::uint64_t k = lo; k <= hi; ++k) acc += mpq_class(1, k);
        return acc;
    }
    std::uint64_t mid = lo + (hi - lo) / 2;
    return reciprocal_sum(lo, mid) + reciprocal_sum(mid + 1, hi);
}

} // namespace

ReducedFraction harmonic_number(std::uint64_t n, std::uint64_t index_cap) {
    if (n == 0) throw std::invalid_argument("harmonic: n must be >= 1");
    if (n > index_cap)
        throw std::invalid_argument("harmonic: n exceeds the exact-arithmetic cap; "
                                    "use the p-adic engine for large indices");
    mpq_class sum = reciprocal_sum(1, n);
    return ReducedFraction(sum.get_num(), sum.get_den());
}

ReducedFraction HarmonicIterator::value() const {
    return ReducedFraction(h_.get_num(), h_.get_den());
}

void HarmonicIterator::advance() {
    ++n_;
    h_ += mpq_class(1, n_);
}

long nu_int(const mpz_class& a, std::uint64_t p) {
    if (a == 0) throw std::invalid_argument("nu_int: valuation of 0 is undefined here");
    if (!is_prime(p)) throw std::invalid_argument("nu_int: p must be prime");
    mpz_class tmp, pz(static_cast<unsigned long>(p));
    return static_cast<long>(mpz_remove(tmp.get_mpz_t(), a.get_mpz_t(), pz.get_mpz_t()));
}

long nu_rat(const ReducedFraction& q, std::uint64_t p) {
    if (q.is_zero()) throw std::invalid_argument("nu_rat: valuation of 0 is undefined here");
    long num = nu_int(q.numerator(), p);
    if (num > 0) return num; // reduced: denominator cannot also carry p
    return -nu_int(q.denominator(), p);
}

mpz_class lcm_range(std::uint64_t a, std::uint64_t b) {
    if (a < 1 || a > b) throw std::invalid_argument("lcm_range: need 1 <= a <= b");
    mpz_class acc(1), kz;
    for (std::uint64_t k = a; k <= b; ++k) {
        kz = static_cast<unsigned long>(k);
        mpz_lcm(acc.get_mpz_t(), acc.get_mpz_t(), kz.get_mpz_t());
    }
    return acc;
}

} // namespace harmonic
