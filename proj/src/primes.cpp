#include "harmonic/primes.hpp"

#include <stdexcept>

namespace harmonic {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((__uint128_t)a * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

bool miller_rabin(std::uint64_t n, std::uint64_t a) {
    if (a % n == 0) return true;
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

} // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        if (n % p == 0) return n == p;
    }
    // Deterministic for all 64-bit inputs with this base set.
    for (std::uint64_t a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        if (!miller_rabin(n, a)) return false;
    }
    return true;
}

std::vector<std::uint64_t> primes_upto(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    if (n < 2) return out;
    std::vector<bool> composite(n + 1, false);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    return out;
}

std::uint64_t least_prime_factor(std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("least_prime_factor: n must be >= 2");
    if (n % 2 == 0) return 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2) {
        if (n % d == 0) return d;
    }
    return n;
}

std::vector<PrimePower> factorize(std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("factorize: n must be >= 2");
    std::vector<PrimePower> out;
    for (std::uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
        if (n % d) continue;
        unsigned e = 0;
        while (n % d == 0) { n /= d; ++e; }
        out.push_back({d, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

bool is_prime_power(std::uint64_t n, PrimePower* pp) {
    if (n < 2) return false;
    auto f = factorize(n);
    if (f.size() != 1) return false;
    if (pp) *pp = f[0];
    return true;
}

std::uint64_t iroot(std::uint64_t n, unsigned b) {
    if (b == 0) throw std::invalid_argument("iroot: b must be >= 1");
    if (b == 1 || n < 2) return n;
    auto pow_leq = [&](std::uint64_t t) {
        // t^b <= n, watching for overflow
        __uint128_t acc = 1;
        for (unsigned i = 0; i < b; ++i) {
            acc *= t;
            if (acc > n) return false;
        }
        return true;
    };
    std::uint64_t lo = 1, hi = 2;
    while (pow_leq(hi)) { lo = hi; hi *= 2; }
    while (lo + 1 < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (pow_leq(mid)) lo = mid; else hi = mid;
    }
    return lo;
}

unsigned ilog(std::uint64_t p, std::uint64_t limit) {
    if (p < 2 || limit < 1) throw std::invalid_argument("ilog: need p >= 2, limit >= 1");
    unsigned e = 0;
    __uint128_t v = p;
    while (v <= limit) { ++e; v *= p; }
    return e;
}

std::uint64_t ipow(std::uint64_t p, unsigned e) {
    __uint128_t v = 1;
    for (unsigned i = 0; i < e; ++i) {
        v *= p;
        if (v > UINT64_MAX) throw std::overflow_error("ipow: overflow");
    }
    return static_cast<std::uint64_t>(v);
}

} // namespace harmonic
