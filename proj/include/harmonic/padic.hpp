#pragma once

// Bounded-precision p-adic accumulator for harmonic sums.
//
// The running value is held in common-denominator form p^e * (a/b) with p ∤ b;
// a and b are residues modulo p^W for a fixed working precision W. A counter
// tracks how many low digits of a are certified: adding a term at the same
// valuation can cancel leading digits and spend certified precision, while a
// term at strictly lower valuation restores it to W. The valuation e is exact
// whenever at least one certified digit remains; when a cancellation runs past
// the certified window the operation throws InsufficientPrecision and the
// caller retries at a higher precision or falls back to exact rationals.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "harmonic/rational.hpp"

namespace harmonic {

struct InsufficientPrecision : std::runtime_error {
    InsufficientPrecision(std::uint64_t p, std::uint64_t at_term, unsigned digits);
    std::uint64_t p;
    std::uint64_t at_term; // index m whose 1/m made the unit unresolvable (0 for combines)
    unsigned digits;       // certified digits available when the cancellation hit
};

class PAdicApprox {
public:
    // Zero accumulator working modulo p^working_digits.
    PAdicApprox(std::uint64_t p, unsigned working_digits);

    std::uint64_t prime() const { return p_; }
    unsigned working_digits() const { return work_; }
    bool is_zero() const { return zero_; }

    // Exact p-adic valuation of the represented value (non-zero values only).
    long valuation() const;

    // Number of certified unit digits (>= 1 for any non-zero value).
    unsigned precision() const { return zero_ ? 0 : cert_; }

    // Canonical unit residue a/b mod p^precision(), in [1, p^precision()),
    // not divisible by p.
    mpz_class unit() const;

    void add_reciprocal(std::uint64_t m); // += 1/m, m >= 1
    void add(const PAdicApprox& other);   // p-adic addition; same p and W

private:
    const mpz_class& ppow(unsigned e) const;
    void renormalize(std::uint64_t at_term, unsigned cert_window);

    std::uint64_t p_;
    unsigned work_;
    bool zero_ = true;
    long val_ = 0;
    unsigned cert_ = 0;
    mpz_class num_;   // a, residue mod p^W, p ∤ a while certified
    mpz_class den_;   // b, residue mod p^W, p ∤ b, exact
    mpz_class mod_;   // p^W
    mutable std::vector<mpz_class> ppow_; // lazily extended powers of p
};

PAdicApprox padic_add_reciprocal(PAdicApprox acc, std::uint64_t m);
PAdicApprox padic_add(PAdicApprox a, const PAdicApprox& b);

enum class Certainty { exact_oracle, padic_certified };

struct ValuationResult {
    long value = 0;
    Certainty certainty = Certainty::padic_certified;
    unsigned precision = 0; // ladder precision that resolved it; 0 for oracle
};

struct EngineOptions {
    unsigned initial_precision = 16; // first ladder rung, in p-adic digits
    unsigned max_precision = 1024;   // last rung before the exact fallback
    unsigned guard_digits = 4;       // extra working digits beyond rung + log_p(n)
    unsigned jobs = 1;               // worker threads for block scans
    std::uint64_t block_size = 4096; // fixed partition; independent of jobs
    std::uint64_t oracle_cap = kDefaultIndexCap;
    bool oracle_fallback = true;     // false: exhausting the ladder throws
};

// nu_p(H_n), certified by the accumulator ladder or (on exhaustion) computed
// by the exact oracle. Agrees exactly with nu_rat(harmonic_number(n), p).
ValuationResult harmonic_valuation(std::uint64_t n, std::uint64_t p,
                                   const EngineOptions& opts = {});

// Valuations nu_p(H_n) for every n in [lo, hi], via fixed-size blocks:
// block reciprocal sums in parallel, a sequential prefix combine, then a
// parallel per-index walk inside each block. The partition depends only on
// block_size, so results and engine tags are identical for any jobs value.
struct ScanResult {
    std::uint64_t lo = 1, hi = 0;
    std::vector<long> valuations;   // valuations[n - lo] = nu_p(H_n)
    std::vector<bool> oracle;       // true where the exact fallback decided
    unsigned precision = 0;         // ladder rung that completed the scan
};
ScanResult scan_harmonic_valuations(std::uint64_t lo, std::uint64_t hi, std::uint64_t p,
                                    const EngineOptions& opts = {});

// H_n = partial + (1/p^k) * H_{n1} with n = p^k * n1 + r, 0 <= r < p^k and
// partial the reciprocal sum over m <= n with p^k ∤ m (H_0 = 0). Exact.
struct HarmonicSplit {
    ReducedFraction partial;
    std::uint64_t quotient_index = 0;
    std::uint64_t remainder = 0;
};
HarmonicSplit harmonic_split(std::uint64_t n, std::uint64_t p, unsigned k,
                             std::uint64_t index_cap = kDefaultIndexCap);

} // namespace harmonic
