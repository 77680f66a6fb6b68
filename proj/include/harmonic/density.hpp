#pragma once

// Exception counting for the divisibility-threshold scan: with
// m_n = lcm(1, ..., floor(n^theta)), count T(x) = #{ n <= x : m_n ∤ v_n }.
// The fast path never computes v_n: m_n ∤ v_n iff some prime p <= floor(n^theta)
// has floor(n / p^{a_p}) ∈ J_p ∪ {0}, where p^{a_p} is the largest power of p
// not exceeding floor(n^theta). A brute-force big-rational oracle provides the
// independent check at small n.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "harmonic/cache.hpp"
#include "harmonic/sets.hpp"

namespace harmonic {

// theta = 1/denom with denom in [2, 6]: floor(n^theta) stays an exact integer
// root, so boundary indices never misclassify.
struct Theta {
    unsigned denom = 4;
    std::string str() const { return "1/" + std::to_string(denom); }
};
Theta make_theta(unsigned denom);
Theta parse_theta(const std::string& s); // "1/4"

// floor(n^theta)
std::uint64_t theta_floor_pow(std::uint64_t n, Theta theta);

struct DensityRow {
    std::uint64_t x = 0;
    Theta theta;
    std::uint64_t exceptions = 0; // T(x)
    double ratio = 0.0;           // T(x) / x
    std::uint64_t union_bound = 0; // sum over p <= x^theta of I_{p^alpha_p}(x)
};

// Exception test via J tables, per-n exponents. Insufficient coverage throws
// CoverageError; it never silently returns false.
bool is_exception(std::uint64_t n, Theta theta, const JpTables& tables);

// Variant with exponents fixed at scale x (p^alpha_p <= floor(x^theta)), the
// shape the union bound counts.
bool is_exception_at_scale(std::uint64_t n, std::uint64_t x, Theta theta,
                           const JpTables& tables);

// Brute force: v_n computed exactly, divisibility by lcm(1..floor(n^theta))
// tested directly. n beyond the exact cap is rejected.
bool oracle_exception(std::uint64_t n, Theta theta, std::uint64_t cap = 10'000);

// Streaming variant of the brute-force oracle over n = 1..x (one incremental
// harmonic walk instead of x one-shot summations).
void oracle_exception_scan(std::uint64_t x, Theta theta,
                           const std::function<void(std::uint64_t, bool)>& fn,
                           std::uint64_t cap = 10'000);

// Per-prime table bound needed so every lookup for n <= x is covered.
std::uint64_t density_table_requirement(std::uint64_t x, Theta theta, std::uint64_t p);

// Tables for all primes p <= floor(x^theta) at their required bounds.
JpTables ensure_density_tables(std::uint64_t x, Theta theta, JpCache& cache);

// Union bound sum_{p <= floor(x^theta)} I_{p^{alpha_p}}(x), exponents per-x.
std::uint64_t union_bound_at(std::uint64_t x, Theta theta, const JpTables& tables);

struct DensityOptions {
    unsigned jobs = 1;
    std::vector<std::uint64_t> extra_checkpoints; // merged with powers of 10
    bool per_x_exponent = false;                  // count with alpha_p fixed at the final x
};

// Exact T at every checkpoint (default: powers of 10 up to x, plus x).
// Blocks are fixed-size and merged in index order, so output is identical for
// any jobs value.
std::vector<DensityRow> density_scan(std::uint64_t x, Theta theta, const JpTables& tables,
                                     const DensityOptions& opts = {});

} // namespace harmonic
