#pragma once

// Small integer utilities: primality, factorization, exact roots and logs.

#include <cstdint>
#include <vector>

namespace harmonic {

bool is_prime(std::uint64_t n);

// Ascending list of primes <= n.
std::vector<std::uint64_t> primes_upto(std::uint64_t n);

// Least prime factor of n (n >= 2).
std::uint64_t least_prime_factor(std::uint64_t n);

struct PrimePower {
    std::uint64_t p;
    unsigned exp;
};

// Prime-power factorization, ascending in p (n >= 2).
std::vector<PrimePower> factorize(std::uint64_t n);

// True iff n = p^k for some prime p and k >= 1; fills *pp when given.
bool is_prime_power(std::uint64_t n, PrimePower* pp = nullptr);

// floor(n^(1/b)): the largest t with t^b <= n. Pure integer arithmetic,
// so boundary values (t^b == n) never misclassify.
std::uint64_t iroot(std::uint64_t n, unsigned b);

// Largest e >= 0 with p^e <= limit (p >= 2, limit >= 1).
unsigned ilog(std::uint64_t p, std::uint64_t limit);

// p^e; throws std::overflow_error if it does not fit in 64 bits.
std::uint64_t ipow(std::uint64_t p, unsigned e);

} // namespace harmonic
