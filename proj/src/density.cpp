#include "harmonic/density.hpp"

#include <algorithm>

#include "harmonic/parallel.hpp"
#include "harmonic/primes.hpp"

namespace harmonic {

Theta make_theta(unsigned denom) {
    if (denom < 2 || denom > 6)
        throw std::invalid_argument("theta must be 1/b with b in [2, 6]");
    return Theta{denom};
}

Theta parse_theta(const std::string& s) {
    if (s.size() < 3 || s[0] != '1' || s[1] != '/')
        throw std::invalid_argument("theta must look like 1/4");
    return make_theta(static_cast<unsigned>(std::stoul(s.substr(2))));
}

std::uint64_t theta_floor_pow(std::uint64_t n, Theta theta) {
    return iroot(n, theta.denom);
}

namespace {

// t^b <= n without overflow.
bool pow_leq(std::uint64_t t, unsigned b, std::uint64_t n) {
    __uint128_t acc = 1;
    for (unsigned i = 0; i < b; ++i) {
        acc *= t;
        if (acc > n) return false;
    }
    return true;
}

// Prime/exponent pairs active at threshold t = floor(n^theta): for each
// p <= t, the largest p^a <= t.
struct ActivePower {
    std::uint64_t p;
    std::uint64_t pa;
};

std::vector<ActivePower> active_powers(std::uint64_t t) {
    std::vector<ActivePower> out;
    for (std::uint64_t p : primes_upto(t)) out.push_back({p, ipow(p, ilog(p, t))});
    return out;
}

bool exception_with(const std::vector<ActivePower>& powers, std::uint64_t n,
                    const JpTables& tables) {
    for (const auto& ap : powers) {
        const std::uint64_t q = n / ap.pa;
        if (q == 0) return true; // n < p^a, so p^a cannot divide v_n
        auto it = tables.find(ap.p);
        if (it == tables.end())
            throw CoverageError("density: no J table for p=" + std::to_string(ap.p));
        if (q > it->second.search_bound)
            throw CoverageError("density: J table for p=" + std::to_string(ap.p) +
                                " covers only " + std::to_string(it->second.search_bound) +
                                ", need " + std::to_string(q));
        if (it->second.contains(q)) return true;
    }
    return false;
}

} // namespace

bool is_exception(std::uint64_t n, Theta theta, const JpTables& tables) {
    if (n < 1) throw std::invalid_argument("is_exception: n must be >= 1");
    const std::uint64_t t = theta_floor_pow(n, theta);
    if (t < 2) return false; // m_n = 1 divides everything
    return exception_with(active_powers(t), n, tables);
}

bool is_exception_at_scale(std::uint64_t n, std::uint64_t x, Theta theta,
                           const JpTables& tables) {
    if (n < 1 || n > x) throw std::invalid_argument("is_exception_at_scale: need 1 <= n <= x");
    const std::uint64_t t = theta_floor_pow(x, theta);
    if (t < 2) return false;
    return exception_with(active_powers(t), n, tables);
}

bool oracle_exception(std::uint64_t n, Theta theta, std::uint64_t cap) {
    if (n < 1) throw std::invalid_argument("oracle_exception: n must be >= 1");
    if (n > cap) throw std::invalid_argument("oracle_exception: n exceeds the exact cap");
    const std::uint64_t t = theta_floor_pow(n, theta);
    if (t < 2) return false;
    const mpz_class m_n = lcm_range(1, t);
    const mpz_class v = harmonic_number(n, cap).denominator();
    return mpz_divisible_p(v.get_mpz_t(), m_n.get_mpz_t()) == 0;
}

void oracle_exception_scan(std::uint64_t x, Theta theta,
                           const std::function<void(std::uint64_t, bool)>& fn,
                           std::uint64_t cap) {
    if (x < 1) throw std::invalid_argument("oracle_exception_scan: x must be >= 1");
    if (x > cap) throw std::invalid_argument("oracle_exception_scan: x exceeds the exact cap");
    HarmonicIterator it;
    std::uint64_t t = 1;
    mpz_class m_n(1);
    for (std::uint64_t n = 1; n <= x; ++n) {
        if (n > 1) it.advance();
        while (pow_leq(t + 1, theta.denom, n)) {
            ++t;
            mpz_class tz(static_cast<unsigned long>(t));
            mpz_lcm(m_n.get_mpz_t(), m_n.get_mpz_t(), tz.get_mpz_t());
        }
        const bool exc =
            t >= 2 && mpz_divisible_p(mpq_denref(it.raw().get_mpq_t()), m_n.get_mpz_t()) == 0;
        fn(n, exc);
    }
}

std::uint64_t density_table_requirement(std::uint64_t x, Theta theta, std::uint64_t p) {
    if (!is_prime(p)) throw std::invalid_argument("density_table_requirement: p must be prime");
    const std::uint64_t t_x = theta_floor_pow(x, theta);
    const unsigned alpha = ilog(p, t_x);
    std::uint64_t need = 0;
    for (unsigned a = 1; a <= alpha; ++a) {
        const std::uint64_t pa = ipow(p, a);
        // indices with this exponent: floor(n^theta) in [p^a, p^(a+1) - 1]
        const __uint128_t step = static_cast<__uint128_t>(pa) * p;
        __uint128_t region_hi = 1;
        bool beyond_x = false;
        for (unsigned i = 0; i < theta.denom; ++i) {
            region_hi *= step;
            if (region_hi > x) { beyond_x = true; break; }
        }
        const std::uint64_t hi = beyond_x ? x : static_cast<std::uint64_t>(region_hi - 1);
        need = std::max(need, hi / pa);
    }
    return need;
}

JpTables ensure_density_tables(std::uint64_t x, Theta theta, JpCache& cache) {
    JpTables tables;
    for (std::uint64_t p : primes_upto(theta_floor_pow(x, theta)))
        tables.emplace(p, cache.ensure(p, density_table_requirement(x, theta, p)));
    return tables;
}

std::uint64_t union_bound_at(std::uint64_t x, Theta theta, const JpTables& tables) {
    const std::uint64_t t = theta_floor_pow(x, theta);
    std::uint64_t total = 0;
    for (std::uint64_t p : primes_upto(t)) {
        auto it = tables.find(p);
        if (it == tables.end())
            throw CoverageError("union bound: no J table for p=" + std::to_string(p));
        total += count_ipk_lemma(p, ilog(p, t), x, it->second);
    }
    return total;
}

std::vector<DensityRow> density_scan(std::uint64_t x, Theta theta, const JpTables& tables,
                                     const DensityOptions& opts) {
    if (x < 1) throw std::invalid_argument("density_scan: x must be >= 1");

    std::vector<std::uint64_t> checkpoints;
    for (std::uint64_t c = 10; c <= x; c *= 10) {
        checkpoints.push_back(c);
        if (c > x / 10) break;
    }
    for (std::uint64_t c : opts.extra_checkpoints)
        if (c >= 1 && c <= x) checkpoints.push_back(c);
    checkpoints.push_back(x);
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

    // Fixed partition: cut at multiples of the block size and at checkpoints,
    // independent of the worker count.
    constexpr std::uint64_t kBlock = 8192;
    std::vector<std::uint64_t> cuts; // inclusive upper ends of blocks
    {
        std::size_t ci = 0;
        std::uint64_t lo = 1;
        while (lo <= x) {
            std::uint64_t hi = std::min(x, ((lo - 1) / kBlock + 1) * kBlock);
            while (ci < checkpoints.size() && checkpoints[ci] < lo) ++ci;
            if (ci < checkpoints.size() && checkpoints[ci] < hi) hi = checkpoints[ci];
            cuts.push_back(hi);
            lo = hi + 1;
        }
    }

    // Per-block exception counts, computed independently.
    std::vector<std::uint64_t> block_count(cuts.size(), 0);
    std::vector<std::exception_ptr> errs = parallel_for(
        cuts.size(), opts.jobs, [&](std::size_t bi) {
            const std::uint64_t lo = bi == 0 ? 1 : cuts[bi - 1] + 1;
            const std::uint64_t hi = cuts[bi];
            std::uint64_t t = opts.per_x_exponent ? theta_floor_pow(x, theta)
                                                  : theta_floor_pow(lo, theta);
            std::vector<ActivePower> powers = active_powers(t);
            std::uint64_t count = 0;
            for (std::uint64_t n = lo; n <= hi; ++n) {
                if (!opts.per_x_exponent) {
                    while (pow_leq(t + 1, theta.denom, n)) {
                        ++t;
                        powers = active_powers(t);
                    }
                }
                if (t >= 2 && exception_with(powers, n, tables)) ++count;
            }
            block_count[bi] = count;
        });
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    std::vector<DensityRow> rows;
    std::uint64_t running = 0;
    std::size_t ci = 0;
    for (std::size_t bi = 0; bi < cuts.size(); ++bi) {
        running += block_count[bi];
        while (ci < checkpoints.size() && checkpoints[ci] == cuts[bi]) {
            DensityRow row;
            row.x = checkpoints[ci];
            row.theta = theta;
            row.exceptions = running;
            row.ratio = static_cast<double>(running) / static_cast<double>(row.x);
            row.union_bound = union_bound_at(row.x, theta, tables);
            rows.push_back(row);
            ++ci;
        }
    }
    return rows;
}

} // namespace harmonic
