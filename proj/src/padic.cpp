#include "harmonic/padic.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "harmonic/parallel.hpp"
#include "harmonic/primes.hpp"

namespace harmonic {

InsufficientPrecision::InsufficientPrecision(std::uint64_t p_in, std::uint64_t at_term_in,
                                             unsigned digits_in)
    : std::runtime_error("p-adic precision exhausted (p=" + std::to_string(p_in) +
                         ", term=" + std::to_string(at_term_in) +
                         ", certified digits=" + std::to_string(digits_in) + ")"),
      p(p_in), at_term(at_term_in), digits(digits_in) {}

PAdicApprox::PAdicApprox(std::uint64_t p, unsigned working_digits) : p_(p), work_(working_digits) {
    if (!is_prime(p)) throw std::invalid_argument("PAdicApprox: p must be prime");
    if (working_digits < 1) throw std::invalid_argument("PAdicApprox: need >= 1 working digit");
    ppow_.reserve(work_ + 1);
    ppow_.emplace_back(1);
    mpz_class pz(static_cast<unsigned long>(p));
    ppow_.push_back(pz);
    mpz_pow_ui(mod_.get_mpz_t(), pz.get_mpz_t(), work_);
}

const mpz_class& PAdicApprox::ppow(unsigned e) const {
    while (ppow_.size() <= e) ppow_.push_back(ppow_.back() * ppow_[1]);
    return ppow_[e];
}

long PAdicApprox::valuation() const {
    if (zero_) throw std::logic_error("PAdicApprox: zero accumulator has no valuation");
    return val_;
}

mpz_class PAdicApprox::unit() const {
    if (zero_) throw std::logic_error("PAdicApprox: zero accumulator has no unit");
    const mpz_class& pk = ppow(cert_);
    mpz_class inv;
    if (!mpz_invert(inv.get_mpz_t(), den_.get_mpz_t(), pk.get_mpz_t()))
        throw std::logic_error("PAdicApprox: denominator residue not invertible");
    mpz_class u = num_ * inv;
    mpz_mod(u.get_mpz_t(), u.get_mpz_t(), pk.get_mpz_t());
    return u;
}

// Handles the aftermath of an equal-valuation addition: if p divides the new
// numerator residue, certified digits are consumed; when they would all go,
// the true valuation is unresolvable at this precision.
void PAdicApprox::renormalize(std::uint64_t at_term, unsigned cert_window) {
    cert_ = cert_window;
    if (mpz_divisible_ui_p(num_.get_mpz_t(), static_cast<unsigned long>(p_)) == 0) return;
    mpz_class r;
    mpz_tdiv_r(r.get_mpz_t(), num_.get_mpz_t(), ppow(cert_window).get_mpz_t());
    if (r == 0) throw InsufficientPrecision(p_, at_term, cert_window);
    mpz_class stripped;
    unsigned c = static_cast<unsigned>(
        mpz_remove(stripped.get_mpz_t(), r.get_mpz_t(), ppow(1).get_mpz_t()));
    assert(c < cert_window);
    val_ += static_cast<long>(c);
    mpz_divexact(num_.get_mpz_t(), num_.get_mpz_t(), ppow(c).get_mpz_t());
    cert_ = cert_window - c;
}

void PAdicApprox::add_reciprocal(std::uint64_t m) {
    if (m == 0) throw std::invalid_argument("add_reciprocal: m must be >= 1");
    unsigned j = 0;
    std::uint64_t mm = m;
    while (mm % p_ == 0) { mm /= p_; ++j; }
    const long tv = -static_cast<long>(j);
    const auto mml = static_cast<unsigned long>(mm);

    if (zero_) {
        zero_ = false;
        val_ = tv;
        num_ = 1;
        den_ = mml;
        mpz_mod(den_.get_mpz_t(), den_.get_mpz_t(), mod_.get_mpz_t());
        cert_ = work_;
        return;
    }

    if (val_ < tv) {
        // incoming term sits above the current value: a' = a*mm + b*p^delta
        const auto delta = static_cast<unsigned long>(tv - val_);
        mpz_mul_ui(num_.get_mpz_t(), num_.get_mpz_t(), mml);
        if (delta < work_) mpz_addmul(num_.get_mpz_t(), den_.get_mpz_t(),
                                      ppow(static_cast<unsigned>(delta)).get_mpz_t());
        mpz_mod(num_.get_mpz_t(), num_.get_mpz_t(), mod_.get_mpz_t());
        mpz_mul_ui(den_.get_mpz_t(), den_.get_mpz_t(), mml);
        mpz_mod(den_.get_mpz_t(), den_.get_mpz_t(), mod_.get_mpz_t());
        return;
    }

    if (val_ > tv) {
        // term dominates: a' = b + a*mm*p^delta, and precision refills
        const auto delta = static_cast<unsigned long>(val_ - tv);
        if (delta < work_) {
            mpz_mul_ui(num_.get_mpz_t(), num_.get_mpz_t(), mml);
            mpz_mul(num_.get_mpz_t(), num_.get_mpz_t(),
                    ppow(static_cast<unsigned>(delta)).get_mpz_t());
            mpz_add(num_.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
        } else {
            num_ = den_;
        }
        mpz_mod(num_.get_mpz_t(), num_.get_mpz_t(), mod_.get_mpz_t());
        mpz_mul_ui(den_.get_mpz_t(), den_.get_mpz_t(), mml);
        mpz_mod(den_.get_mpz_t(), den_.get_mpz_t(), mod_.get_mpz_t());
        val_ = tv;
        cert_ = static_cast<unsigned>(
            std::min<unsigned long>(work_, cert_ + delta));
        return;
    }

    // equal valuation: a' = a*mm + b, leading digits may cancel
    mpz_mul_ui(num_.get_mpz_t(), num_.get_mpz_t(), mml);
    mpz_add(num_.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
    mpz_mod(num_.get_mpz_t(), num_.get_mpz_t(), mod_.get_mpz_t());
    mpz_mul_ui(den_.get_mpz_t(), den_.get_mpz_t(), mml);
    mpz_mod(den_.get_mpz_t(), den_.get_mpz_t(), mod_.get_mpz_t());
    renormalize(m, cert_);
}

void PAdicApprox::add(const PAdicApprox& other) {
    if (p_ != other.p_ || work_ != other.work_)
        throw std::invalid_argument("PAdicApprox::add: mismatched prime or precision");
    if (other.zero_) return;
    if (zero_) {
        *this = other;
        return;
    }

    mpz_class cross;
    if (val_ < other.val_) {
        const auto delta = static_cast<unsigned long>(other.val_ - val_);
        mpz_mul(num_.get_mpz_t(), num_.get_mpz_t(), other.den_.get_mpz_t());
        if (delta < work_) {
            mpz_mul(cross.get_mpz_t(), other.num_.get_mpz_t(), den_.get_mpz_t());
            mpz_mul(cross.get_mpz_t(), cross.get_mpz_t(),
                    ppow(static_cast<unsigned>(delta)).get_mpz_t());
            mpz_add(num_.get_mpz_t(), num_.get_mpz_t(), cross.get_mpz_t());
        }
        mpz_mod(num_.get_mpz_t(), num_.get_mpz_t(), mod_.get_mpz_t());
        mpz_mul(den_.get_mpz_t(), den_.get_mpz_t(), other.den_.get_mpz_t());
        mpz_mod(den_.get_mpz_t(), den_.get_mpz_t(), mod_.get_mpz_t());
        cert_ = static_cast<unsigned>(std::min<unsigned long>(cert_, delta + other.cert_));
        return;
    }

    if (val_ > other.val_) {
        const auto delta = static_cast<unsigned long>(val_ - other.val_);
        mpz_mul(cross.get_mpz_t(), other.num_.get_mpz_t(), den_.get_mpz_t());
        if (delta < work_) {
            mpz_mul(num_.get_mpz_t(), num_.get_mpz_t(), other.den_.get_mpz_t());
            mpz_mul(num_.get_mpz_t(), num_.get_mpz_t(),
                    ppow(static_cast<unsigned>(delta)).get_mpz_t());
            mpz_add(num_.get_mpz_t(), num_.get_mpz_t(), cross.get_mpz_t());
        } else {
            num_ = cross;
        }
        mpz_mod(num_.get_mpz_t(), num_.get_mpz_t(), mod_.get_mpz_t());
        mpz_mul(den_.get_mpz_t(), den_.get_mpz_t(), other.den_.get_mpz_t());
        mpz_mod(den_.get_mpz_t(), den_.get_mpz_t(), mod_.get_mpz_t());
        val_ = other.val_;
        cert_ = static_cast<unsigned>(
            std::min<unsigned long>({static_cast<unsigned long>(other.cert_),
                                     delta + cert_,
                                     static_cast<unsigned long>(work_)}));
        return;
    }

    mpz_mul(num_.get_mpz_t(), num_.get_mpz_t(), other.den_.get_mpz_t());
    mpz_mul(cross.get_mpz_t(), other.num_.get_mpz_t(), den_.get_mpz_t());
    mpz_add(num_.get_mpz_t(), num_.get_mpz_t(), cross.get_mpz_t());
    mpz_mod(num_.get_mpz_t(), num_.get_mpz_t(), mod_.get_mpz_t());
    mpz_mul(den_.get_mpz_t(), den_.get_mpz_t(), other.den_.get_mpz_t());
    mpz_mod(den_.get_mpz_t(), den_.get_mpz_t(), mod_.get_mpz_t());
    renormalize(0, std::min(cert_, other.cert_));
}

PAdicApprox padic_add_reciprocal(PAdicApprox acc, std::uint64_t m) {
    acc.add_reciprocal(m);
    return acc;
}

PAdicApprox padic_add(PAdicApprox a, const PAdicApprox& b) {
    a.add(b);
    return a;
}

namespace {

struct Range {
    std::uint64_t lo, hi; // inclusive
};

// Partition [lo, hi] at absolute multiples of bs, so the blocks a given index
// lands in never depend on the number of workers.
std::vector<Range> aligned_blocks(std::uint64_t lo, std::uint64_t hi, std::uint64_t bs) {
    std::vector<Range> out;
    std::uint64_t s = lo;
    while (s <= hi) {
        std::uint64_t e = std::min(hi, ((s - 1) / bs + 1) * bs);
        out.push_back({s, e});
        s = e + 1;
    }
    return out;
}

unsigned working_digits_for(std::uint64_t p, std::uint64_t hi, unsigned rung,
                            const EngineOptions& opts) {
    return rung + ilog(p, hi) + opts.guard_digits;
}

void validate_engine_inputs(std::uint64_t p, const EngineOptions& opts) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (opts.initial_precision < 1 || opts.block_size < 1 || opts.jobs < 1)
        throw std::invalid_argument("invalid engine options");
}

// Exact fallback walk: valuations from true big-rational prefix sums.
void oracle_walk(std::uint64_t lo, std::uint64_t hi, std::uint64_t p,
                 const EngineOptions& opts, ScanResult& out) {
    if (hi > opts.oracle_cap)
        throw InsufficientPrecision(p, hi, opts.max_precision);
    mpq_class h = (lo == 1) ? mpq_class(0) : harmonic_number(lo - 1, opts.oracle_cap).raw();
    for (std::uint64_t n = lo; n <= hi; ++n) {
        h += mpq_class(1, n);
        out.valuations[n - lo] = nu_rat(ReducedFraction(h.get_num(), h.get_den()), p);
        out.oracle[n - lo] = true;
    }
    out.precision = 0;
}

} // namespace

ScanResult scan_harmonic_valuations(std::uint64_t lo, std::uint64_t hi, std::uint64_t p,
                                    const EngineOptions& opts) {
    validate_engine_inputs(p, opts);
    if (lo < 1 || lo > hi) throw std::invalid_argument("scan: need 1 <= lo <= hi");

    ScanResult out;
    out.lo = lo;
    out.hi = hi;
    out.valuations.assign(hi - lo + 1, 0);
    out.oracle.assign(hi - lo + 1, false);

    const auto prefix_blocks = aligned_blocks(1, lo - 1, opts.block_size); // empty when lo == 1
    const auto scan_blocks = aligned_blocks(lo, hi, opts.block_size);

    for (unsigned rung = opts.initial_precision; rung <= opts.max_precision; rung *= 2) {
        const unsigned W = working_digits_for(p, hi, rung, opts);
        bool retry = false;

        // phase 1: independent reciprocal sums per block
        std::vector<PAdicApprox> sums(prefix_blocks.size() + scan_blocks.size(),
                                      PAdicApprox(p, W));
        auto block_at = [&](std::size_t i) -> const Range& {
            return i < prefix_blocks.size() ? prefix_blocks[i]
                                            : scan_blocks[i - prefix_blocks.size()];
        };
        auto errs = parallel_for(sums.size(), opts.jobs, [&](std::size_t i) {
            const Range& r = block_at(i);
            for (std::uint64_t m = r.lo; m <= r.hi; ++m) sums[i].add_reciprocal(m);
        });
        for (auto& e : errs) {
            if (!e) continue;
            try { std::rethrow_exception(e); }
            catch (const InsufficientPrecision&) { retry = true; }
        }
        if (retry) continue;

        // phase 2: sequential prefix combine; start[i] = H_{scan_blocks[i].lo - 1}
        std::vector<PAdicApprox> start(scan_blocks.size(), PAdicApprox(p, W));
        try {
            PAdicApprox acc(p, W);
            for (std::size_t i = 0; i < prefix_blocks.size(); ++i) acc.add(sums[i]);
            for (std::size_t i = 0; i < scan_blocks.size(); ++i) {
                start[i] = acc;
                acc.add(sums[prefix_blocks.size() + i]);
            }
        } catch (const InsufficientPrecision&) {
            continue;
        }

        // phase 3: per-index walk inside each block
        errs = parallel_for(scan_blocks.size(), opts.jobs, [&](std::size_t i) {
            PAdicApprox acc = start[i];
            for (std::uint64_t n = scan_blocks[i].lo; n <= scan_blocks[i].hi; ++n) {
                acc.add_reciprocal(n);
                out.valuations[n - lo] = acc.valuation();
            }
        });
        for (auto& e : errs) {
            if (!e) continue;
            try { std::rethrow_exception(e); }
            catch (const InsufficientPrecision&) { retry = true; }
        }
        if (retry) continue;

        out.precision = rung;
        return out;
    }

    if (!opts.oracle_fallback)
        throw InsufficientPrecision(p, hi, opts.max_precision);
    oracle_walk(lo, hi, p, opts, out);
    return out;
}

ValuationResult harmonic_valuation(std::uint64_t n, std::uint64_t p, const EngineOptions& opts) {
    validate_engine_inputs(p, opts);
    if (n < 1) throw std::invalid_argument("harmonic_valuation: n must be >= 1");

    for (unsigned rung = opts.initial_precision; rung <= opts.max_precision; rung *= 2) {
        try {
            PAdicApprox acc(p, working_digits_for(p, n, rung, opts));
            for (std::uint64_t m = 1; m <= n; ++m) acc.add_reciprocal(m);
            return {acc.valuation(), Certainty::padic_certified, rung};
        } catch (const InsufficientPrecision&) {
        }
    }
    if (opts.oracle_fallback && n <= opts.oracle_cap)
        return {nu_rat(harmonic_number(n, opts.oracle_cap), p), Certainty::exact_oracle, 0};
    throw InsufficientPrecision(p, n, opts.max_precision);
}

namespace {

// Reciprocal sum over [lo, hi] skipping multiples of pk.
mpq_class skipping_sum(std::uint64_t lo, std::uint64_t hi, std::uint64_t pk) {
    if (hi - lo < 32) {
        mpq_class acc(0);
        for (std::uint64_t m = lo; m <= hi; ++m)
            if (m % pk != 0) acc += mpq_class(1, m);
        return acc;
    }
    std::uint64_t mid = lo + (hi - lo) / 2;
    return skipping_sum(lo, mid, pk) + skipping_sum(mid + 1, hi, pk);
}

} // namespace

HarmonicSplit harmonic_split(std::uint64_t n, std::uint64_t p, unsigned k,
                             std::uint64_t index_cap) {
    if (n < 1) throw std::invalid_argument("harmonic_split: n must be >= 1");
    if (!is_prime(p)) throw std::invalid_argument("harmonic_split: p must be prime");
    if (k < 1) throw std::invalid_argument("harmonic_split: k must be >= 1");
    if (n > index_cap) throw std::invalid_argument("harmonic_split: n exceeds the exact cap");

    HarmonicSplit out;
    if (ilog(p, n) < k) {
        // n < p^k: nothing to split off
        out.partial = harmonic_number(n, index_cap);
        out.quotient_index = 0;
        out.remainder = n;
        return out;
    }
    const std::uint64_t pk = ipow(p, k);
    out.quotient_index = n / pk;
    out.remainder = n % pk;
    mpq_class partial = skipping_sum(1, n, pk);
    out.partial = ReducedFraction(partial.get_num(), partial.get_den());
    return out;
}

} // namespace harmonic
