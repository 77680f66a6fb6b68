#include "harmonic/sets.hpp"

#include <algorithm>
#include <cmath>

#include "harmonic/primes.hpp"

namespace harmonic {

std::string to_string(MemberEngine e) {
    return e == MemberEngine::padic ? "padic" : "oracle";
}

MemberEngine member_engine_from_string(const std::string& s) {
    if (s == "padic") return MemberEngine::padic;
    if (s == "oracle") return MemberEngine::oracle;
    throw std::invalid_argument("unknown engine tag: " + s);
}

bool JpTable::contains(std::uint64_t n) const {
    auto it = std::lower_bound(members.begin(), members.end(), n,
                               [](const JpMember& m, std::uint64_t v) { return m.n < v; });
    return it != members.end() && it->n == n;
}

std::uint64_t JpTable::count_upto(std::uint64_t x) const {
    auto it = std::upper_bound(members.begin(), members.end(), x,
                               [](std::uint64_t v, const JpMember& m) { return v < m.n; });
    return static_cast<std::uint64_t>(it - members.begin());
}

std::vector<std::uint64_t> JpTable::values_upto(std::uint64_t x) const {
    std::vector<std::uint64_t> out;
    for (const auto& m : members) {
        if (m.n > x) break;
        out.push_back(m.n);
    }
    return out;
}

namespace {

// Oracle re-verification of listed members: nu_p(H_n) >= 1 and p ∤ v_n.
void spot_check_members(const JpTable& table, const EngineOptions& opts) {
    if (table.members.empty()) return;
    std::vector<std::size_t> picks;
    const std::size_t size = table.members.size();
    if (size <= 10) {
        for (std::size_t i = 0; i < size; ++i) picks.push_back(i);
    } else {
        const std::size_t want = (size + 9) / 10;
        for (std::size_t i = 0; i < want; ++i)
            picks.push_back(i * (size - 1) / want);
        picks.push_back(size - 1); // always the most expensive member
    }
    for (std::size_t i : picks) {
        const std::uint64_t n = table.members[i].n;
        if (n > opts.oracle_cap) continue;
        ReducedFraction h = harmonic_number(n, opts.oracle_cap);
        if (nu_rat(h, table.p) < 1 || mpz_divisible_ui_p(h.denominator().get_mpz_t(),
                                                         static_cast<unsigned long>(table.p)))
            throw std::logic_error("J_p spot check failed at n=" + std::to_string(n));
    }
}

void scan_members_into(JpTable& table, std::uint64_t lo, std::uint64_t hi,
                       const EngineOptions& opts) {
    ScanResult scan = scan_harmonic_valuations(lo, hi, table.p, opts);
    for (std::uint64_t n = lo; n <= hi; ++n) {
        if (scan.valuations[n - lo] >= 1)
            table.members.push_back({n, scan.oracle[n - lo] ? MemberEngine::oracle
                                                            : MemberEngine::padic});
    }
}

} // namespace

JpTable compute_jp(std::uint64_t p, std::uint64_t bound, const EngineOptions& opts,
                   bool spot_check) {
    if (!is_prime(p)) throw std::invalid_argument("compute_jp: p must be prime");
    if (bound < 1) throw std::invalid_argument("compute_jp: bound must be >= 1");
    JpTable table;
    table.p = p;
    table.search_bound = bound;
    scan_members_into(table, 1, bound, opts);
    if (spot_check) spot_check_members(table, opts);
    return table;
}

void extend_jp(JpTable& table, std::uint64_t new_bound, const EngineOptions& opts,
               bool spot_check) {
    if (new_bound <= table.search_bound) return;
    scan_members_into(table, table.search_bound + 1, new_bound, opts);
    table.search_bound = new_bound;
    if (spot_check) spot_check_members(table, opts);
}

std::vector<std::uint64_t> enumerate_ipk_lemma(std::uint64_t p, unsigned k, std::uint64_t x,
                                               const JpTable& table) {
    if (!is_prime(p)) throw std::invalid_argument("enumerate_ipk_lemma: p must be prime");
    if (k < 1 || x < 1) throw std::invalid_argument("enumerate_ipk_lemma: need k >= 1, x >= 1");
    if (table.p != p) throw std::invalid_argument("enumerate_ipk_lemma: table is for another prime");

    std::vector<std::uint64_t> out;
    if (ilog(p, x) < k) {
        // x < p^k: every n <= x qualifies (quotient 0)
        out.reserve(x);
        for (std::uint64_t n = 1; n <= x; ++n) out.push_back(n);
        return out;
    }
    const std::uint64_t pk = ipow(p, k);
    const std::uint64_t max_quotient = x / pk;
    if (table.search_bound < max_quotient)
        throw CoverageError("enumerate_ipk_lemma: table bound " +
                            std::to_string(table.search_bound) + " < required " +
                            std::to_string(max_quotient));

    auto emit_block = [&](std::uint64_t n1) {
        const std::uint64_t base = pk * n1;
        const std::uint64_t first = (n1 == 0) ? 1 : base; // the formula set minus {0}
        const std::uint64_t last = std::min(x, base + pk - 1);
        for (std::uint64_t n = first; n <= last; ++n) out.push_back(n);
    };
    emit_block(0);
    for (const auto& m : table.members) {
        if (m.n > max_quotient) break;
        emit_block(m.n);
    }
    return out;
}

std::uint64_t count_ipk_lemma(std::uint64_t p, unsigned k, std::uint64_t x,
                              const JpTable& table) {
    if (!is_prime(p)) throw std::invalid_argument("count_ipk_lemma: p must be prime");
    if (k < 1 || x < 1) throw std::invalid_argument("count_ipk_lemma: need k >= 1, x >= 1");
    if (table.p != p) throw std::invalid_argument("count_ipk_lemma: table is for another prime");
    if (ilog(p, x) < k) return x;
    const std::uint64_t pk = ipow(p, k);
    const std::uint64_t max_quotient = x / pk;
    if (table.search_bound < max_quotient)
        throw CoverageError("count_ipk_lemma: table bound too small");
    std::uint64_t count = std::min(x, pk - 1); // the n1 = 0 block
    for (const auto& m : table.members) {
        if (m.n > max_quotient) break;
        const std::uint64_t base = pk * m.n;
        count += std::min(x, base + pk - 1) - base + 1;
    }
    return count;
}

std::vector<std::uint64_t> enumerate_ipk_direct(std::uint64_t p, unsigned k, std::uint64_t x,
                                                const EngineOptions& opts) {
    if (k < 1 || x < 1) throw std::invalid_argument("enumerate_ipk_direct: need k >= 1, x >= 1");
    ScanResult scan = scan_harmonic_valuations(1, x, p, opts);
    std::vector<std::uint64_t> out;
    const long threshold = -static_cast<long>(k);
    for (std::uint64_t n = 1; n <= x; ++n)
        if (scan.valuations[n - 1] > threshold) out.push_back(n);
    return out;
}

std::vector<std::uint64_t> enumerate_im(std::uint64_t m, std::uint64_t x,
                                        const JpTables& tables) {
    if (m < 2) throw std::invalid_argument("enumerate_im: m must be >= 2 (I_1 is empty)");
    if (x < 1) throw std::invalid_argument("enumerate_im: x must be >= 1");
    std::vector<std::uint64_t> out;
    for (const auto& pp : factorize(m)) {
        auto it = tables.find(pp.p);
        if (it == tables.end())
            throw CoverageError("enumerate_im: no J table supplied for p=" + std::to_string(pp.p));
        auto part = enumerate_ipk_lemma(pp.p, pp.exp, x, it->second);
        std::vector<std::uint64_t> merged;
        merged.reserve(out.size() + part.size());
        std::set_union(out.begin(), out.end(), part.begin(), part.end(),
                       std::back_inserter(merged));
        out = std::move(merged);
    }
    return out;
}

SetCountReport verify_bounds(std::uint64_t m, std::uint64_t x, std::uint64_t im_count,
                             std::optional<std::uint64_t> jp_count) {
    if (m < 2 || x < 1) throw std::invalid_argument("verify_bounds: need m >= 2, x >= 1");
    SetCountReport r;
    r.m = m;
    r.x = x;
    r.count = im_count;
    r.q = least_prime_factor(m);
    r.jp_count = jp_count;

    const double xd = static_cast<double>(x);
    const double md = static_cast<double>(m);
    const double lnq = std::log(static_cast<double>(r.q));
    const double main_exp = 2.0 / 3.0 + 1.0 / (25.0 * lnq);

    r.bound_thm1 = 4.0 * std::cbrt(md) * std::pow(xd, main_exp);
    r.pass = (static_cast<double>(im_count) <= r.bound_thm1);

    PrimePower pp;
    if (is_prime_power(m, &pp)) {
        r.bound_lemma22 = 4.0 * std::pow(md, 1.0 / 3.0 - 1.0 / (25.0 * lnq)) *
                          std::pow(xd, main_exp);
        r.pass = r.pass && (static_cast<double>(im_count) <= *r.bound_lemma22);
    }
    if (is_prime(m)) {
        r.bound_eq11 = 3.0 * std::pow(xd, main_exp);
        r.bound_sanna = 129.0 * std::pow(md, 2.0 / 3.0) * std::pow(xd, 0.765);
        if (jp_count) {
            const double jc = static_cast<double>(*jp_count);
            r.pass = r.pass && jc <= *r.bound_eq11 && jc <= *r.bound_sanna;
        }
    }
    return r;
}

} // namespace harmonic
