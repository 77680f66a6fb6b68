#pragma once

// The divisibility sets attached to harmonic denominators:
//   J_p  = { n : p | u_n }                (numerator divisible by p)
//   I_m  = { n : m ∤ v_n }                (denominator not divisible by m)
// with I_{p^k} characterized by nu_p(H_n) > -k, equivalently
// floor(n / p^k) ∈ J_p ∪ {0}. Complete J_p listings up to a bound drive the
// closed-form enumerations; a direct valuation scan provides the second,
// independent route.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harmonic/padic.hpp"

namespace harmonic {

enum class MemberEngine { padic, oracle };

std::string to_string(MemberEngine e);
MemberEngine member_engine_from_string(const std::string& s);

struct JpMember {
    std::uint64_t n;
    MemberEngine engine;
};

// Complete listing of J_p ∩ [1, search_bound], each member certified with the
// recorded engine.
struct JpTable {
    std::uint64_t p = 0;
    std::uint64_t search_bound = 0;
    std::vector<JpMember> members; // ascending n

    bool contains(std::uint64_t n) const;
    std::uint64_t count_upto(std::uint64_t x) const;
    std::vector<std::uint64_t> values_upto(std::uint64_t x) const;
};

using JpTables = std::map<std::uint64_t, JpTable>;

// Scans every n <= bound; a precision failure escalates the ladder and, in
// the last resort, the exact oracle — indices are never skipped. When
// spot_check is set, a >=10% member sample (all members for small tables,
// always including the largest) is re-verified against exact arithmetic.
JpTable compute_jp(std::uint64_t p, std::uint64_t bound, const EngineOptions& opts = {},
                   bool spot_check = true);

// Extends table to new_bound scanning only (table.search_bound, new_bound].
void extend_jp(JpTable& table, std::uint64_t new_bound, const EngineOptions& opts = {},
               bool spot_check = true);

// I_{p^k} ∩ [1, x] from the closed form {p^k*n1 + r : n1 ∈ J_p ∪ {0}},
// no valuations computed. Requires table.search_bound >= floor(x / p^k).
std::vector<std::uint64_t> enumerate_ipk_lemma(std::uint64_t p, unsigned k, std::uint64_t x,
                                               const JpTable& table);
std::uint64_t count_ipk_lemma(std::uint64_t p, unsigned k, std::uint64_t x,
                              const JpTable& table);

// I_{p^k} ∩ [1, x] by scanning valuations: { n <= x : nu_p(H_n) > -k }.
std::vector<std::uint64_t> enumerate_ipk_direct(std::uint64_t p, unsigned k, std::uint64_t x,
                                                const EngineOptions& opts = {});

// I_m ∩ [1, x] for m >= 2: union of I_{p^a} over prime powers p^a || m.
// Needs a table for every such p with search_bound >= floor(x / p^a).
std::vector<std::uint64_t> enumerate_im(std::uint64_t m, std::uint64_t x,
                                        const JpTables& tables);

// Counting-bound report for one (m, x) instance. count is I_m(x); the
// prime-power and prime columns apply only when m has that shape, and the
// J-set bounds are checked against jp_count = J_m(x).
struct SetCountReport {
    std::uint64_t m = 0;
    std::uint64_t x = 0;
    std::uint64_t count = 0; // I_m(x)
    std::uint64_t q = 0;     // least prime factor of m
    double bound_thm1 = 0.0; // 4 m^(1/3) x^(2/3 + 1/(25 ln q))
    std::optional<double> bound_lemma22; // prime powers p^k
    std::optional<double> bound_eq11;    // primes: J bound 3 x^(2/3 + 1/(25 ln p))
    std::optional<double> bound_sanna;   // primes: J bound 129 p^(2/3) x^0.765
    std::optional<std::uint64_t> jp_count;
    bool pass = false;
};

SetCountReport verify_bounds(std::uint64_t m, std::uint64_t x, std::uint64_t im_count,
                             std::optional<std::uint64_t> jp_count = std::nullopt);

struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace harmonic
