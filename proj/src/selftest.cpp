#include "harmonic/selftest.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "harmonic/cache.hpp"
#include "harmonic/cli.hpp"
#include "harmonic/density.hpp"
#include "harmonic/padic.hpp"
#include "harmonic/primes.hpp"
#include "harmonic/rational.hpp"
#include "harmonic/sets.hpp"

namespace harmonic {

namespace {

namespace fs = std::filesystem;

// Published member lists these computations must reproduce exactly.
const std::vector<std::uint64_t> kJ3 = {2, 7, 22};
const std::vector<std::uint64_t> kJ5 = {4, 20, 24};
const std::vector<std::uint64_t> kJ7 = {6,    42,    48,    295,   299,   337,  341,
                                        2096, 2390,  14675, 16731, 16735, 102728};

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path = fs::temp_directory_path() /
               ("harmonic-acceptance-" + tag + "-" + std::to_string(counter.fetch_add(1)) +
                "-" + std::to_string(static_cast<unsigned long>(::getpid())));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

EngineOptions engine_options(unsigned jobs) {
    EngineOptions opts;
    opts.jobs = jobs;
    return opts;
}

std::string join(const std::vector<std::uint64_t>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

CriterionResult criterion_jp_reproduction(unsigned jobs) {
    CriterionResult r{1, "J_p reproduction for p = 3, 5, 7", false, "", 0};
    TempDir td("jp");
    JpCache cache(td.path, engine_options(jobs));
    const auto j3 = cache.ensure(3, 10'000).values_upto(10'000);
    const auto j5 = cache.ensure(5, 10'000).values_upto(10'000);
    const auto j7 = cache.ensure(7, 110'000).values_upto(110'000);
    r.pass = (j3 == kJ3) && (j5 == kJ5) && (j7 == kJ7);
    std::ostringstream os;
    os << "J_3={" << join(j3) << "} J_5={" << join(j5) << "} |J_7 <= 110000| = " << j7.size();
    if (j7 != kJ7) os << " (expected {" << join(kJ7) << "}, got {" << join(j7) << "})";
    r.detail = os.str();
    return r;
}

CriterionResult criterion_j2_parity(unsigned jobs) {
    CriterionResult r{2, "J_2 empty and v_n even for 2 <= n <= 10^4", false, "", 0};
    TempDir td("j2");
    std::ostringstream out, err;
    const int rc = cli::run({"jp", "2", "--bound", "100000", "--cache-dir", td.path.string(),
                             "--jobs", std::to_string(jobs)},
                            out, err);
    std::uint64_t odd_denominators = 0;
    HarmonicIterator it;
    for (std::uint64_t n = 2; n <= 10'000; ++n) {
        it.advance();
        if (mpz_even_p(mpq_denref(it.raw().get_mpq_t())) == 0) ++odd_denominators;
    }
    r.pass = rc == 0 && out.str().empty() && odd_denominators == 0;
    std::ostringstream os;
    os << "jp 2 --bound 100000 printed " << out.str().size()
       << " bytes, odd denominators in [2,10^4]: " << odd_denominators;
    r.detail = os.str();
    return r;
}

CriterionResult criterion_lemma_equivalence(unsigned jobs) {
    CriterionResult r{3, "closed-form vs direct I_{p^k} enumeration", false, "", 0};
    TempDir td("ipk");
    JpCache cache(td.path, engine_options(jobs));
    unsigned compared = 0, mismatched = 0;
    for (std::uint64_t p : {3ull, 5ull, 7ull}) {
        const JpTable table = cache.ensure(p, 5000 / p);
        for (unsigned k = 1; k <= 3; ++k) {
            const auto lemma = enumerate_ipk_lemma(p, k, 5000, table);
            const auto direct = enumerate_ipk_direct(p, k, 5000, engine_options(jobs));
            ++compared;
            if (lemma != direct) ++mismatched;
        }
    }
    const JpTable j2 = cache.ensure(2, 100);
    const bool i2_ok = enumerate_ipk_lemma(2, 1, 100, j2) == std::vector<std::uint64_t>{1} &&
                       enumerate_ipk_direct(2, 1, 100, engine_options(jobs)) ==
                           std::vector<std::uint64_t>{1};
    const bool i4_ok =
        enumerate_ipk_lemma(2, 2, 100, j2) == std::vector<std::uint64_t>{1, 2, 3} &&
        enumerate_ipk_direct(2, 2, 100, engine_options(jobs)) ==
            std::vector<std::uint64_t>{1, 2, 3};
    r.pass = mismatched == 0 && i2_ok && i4_ok;
    std::ostringstream os;
    os << compared << " (p,k) pairs at x=5000, " << mismatched << " mismatches; I_2 cap 100 "
       << (i2_ok ? "= {1}" : "WRONG") << ", I_4 cap 100 " << (i4_ok ? "= {1,2,3}" : "WRONG");
    r.detail = os.str();
    return r;
}

CriterionResult criterion_engine_oracle(unsigned jobs) {
    CriterionResult r{4, "engine valuations equal the exact oracle (n <= 2000)", false, "", 0};
    (void)jobs; // per-call ladder walks are sequential by definition
    std::uint64_t mismatches = 0, oracle_fallbacks = 0;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        HarmonicIterator it;
        for (std::uint64_t n = 1; n <= 2000; ++n) {
            if (n > 1) it.advance();
            const long expected = nu_rat(it.value(), p);
            const ValuationResult got = harmonic_valuation(n, p);
            if (got.value != expected) ++mismatches;
            if (got.certainty == Certainty::exact_oracle) ++oracle_fallbacks;
        }
    }
    r.pass = mismatches == 0;
    std::ostringstream os;
    os << "12000 comparisons, " << mismatches << " mismatches, " << oracle_fallbacks
       << " oracle fallbacks";
    r.detail = os.str();
    return r;
}

CriterionResult criterion_counting_bounds(unsigned jobs) {
    CriterionResult r{5, "counting bounds for all m in [2,50], x in {10^2,10^3,10^4}", false,
                      "", 0};
    TempDir td("bounds");
    JpCache cache(td.path, engine_options(jobs));
    JpTables tables;
    for (std::uint64_t p : primes_upto(50)) tables.emplace(p, cache.ensure(p, 10'000));

    unsigned instances = 0, failures = 0, monotonic_violations = 0;
    for (std::uint64_t m = 2; m <= 50; ++m) {
        std::uint64_t prev_count = 0;
        for (std::uint64_t x : {100ull, 1'000ull, 10'000ull}) {
            const auto members = enumerate_im(m, x, tables);
            std::optional<std::uint64_t> jq;
            if (is_prime(m)) jq = tables.at(m).count_upto(x);
            const SetCountReport report = verify_bounds(m, x, members.size(), jq);
            ++instances;
            if (!report.pass) ++failures;
            if (members.size() < prev_count) ++monotonic_violations;
            prev_count = members.size();
        }
    }
    r.pass = failures == 0 && monotonic_violations == 0;
    std::ostringstream os;
    os << instances << " instances, " << failures << " bound failures, "
       << monotonic_violations << " monotonicity violations";
    r.detail = os.str();
    return r;
}

CriterionResult criterion_split_identity(unsigned jobs) {
    CriterionResult r{6, "reciprocal-sum split identity on 500 random cases", false, "", 0};
    (void)jobs;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    const auto primes = primes_upto(997);
    unsigned failures = 0;
    for (unsigned trial = 0; trial < 500; ++trial) {
        const std::uint64_t n = 1 + rng() % 10'000;
        const std::uint64_t p = primes[rng() % primes.size()];
        const unsigned kmax = std::max(1u, ilog(p, 1'000));
        const unsigned k = 1 + static_cast<unsigned>(rng() % kmax);
        const HarmonicSplit split = harmonic_split(n, p, k);

        bool ok = true;
        if (ilog(p, n) >= k) {
            const std::uint64_t pk = ipow(p, k);
            ok = ok && n == pk * split.quotient_index + split.remainder &&
                 split.remainder < pk;
        } else {
            ok = ok && split.quotient_index == 0 && split.remainder == n;
        }
        mpq_class reconstructed = split.partial.raw();
        if (split.quotient_index > 0) {
            const mpq_class scale(1, ipow(p, k));
            reconstructed += scale * harmonic_number(split.quotient_index).raw();
        }
        ok = ok && reconstructed == harmonic_number(n).raw();
        if (!ok) ++failures;
    }
    r.pass = failures == 0;
    r.detail = "500 trials, " + std::to_string(failures) + " failures";
    return r;
}

CriterionResult criterion_density(unsigned jobs) {
    CriterionResult r{7, "density: oracle agreement, union bound, ratio trend", false, "", 0};
    TempDir td("density");
    JpCache cache(td.path, engine_options(jobs));
    const Theta theta = make_theta(4);

    // exact agreement on [1, 10^4]
    JpTables tables = ensure_density_tables(10'000, theta, cache);
    std::uint64_t mismatches = 0;
    oracle_exception_scan(10'000, theta, [&](std::uint64_t n, bool expected) {
        if (is_exception(n, theta, tables) != expected) ++mismatches;
    });
    const bool oracle_ok = mismatches == 0;

    // fast path to 10^5 (extends the cached tables)
    tables = ensure_density_tables(100'000, theta, cache);
    DensityOptions opts;
    opts.jobs = jobs;
    const auto rows = density_scan(100'000, theta, tables, opts);

    bool union_ok = true;
    std::optional<double> r3, r4, r5;
    std::ostringstream trail;
    for (const auto& row : rows) {
        union_ok = union_ok && row.exceptions <= row.union_bound;
        if (row.x == 1'000) r3 = row.ratio;
        if (row.x == 10'000) r4 = row.ratio;
        if (row.x == 100'000) r5 = row.ratio;
        trail << " T(" << row.x << ")=" << row.exceptions << "<=" << row.union_bound;
    }
    const bool have_rows = r3 && r4 && r5;
    const bool trend_ok = have_rows && *r3 >= *r4 && *r4 >= *r5;

    r.pass = oracle_ok && union_ok && trend_ok;
    std::ostringstream os;
    os << "oracle agreement " << (oracle_ok ? "ok" : ("FAILED (" + std::to_string(mismatches) + ")"))
       << "; union bound " << (union_ok ? "ok" : "FAILED") << ";" << trail.str();
    if (have_rows) {
        os << "; ratios " << *r3 << " -> " << *r4 << " -> " << *r5 << " "
           << (trend_ok ? "(nonincreasing)" : "(NOT nonincreasing)");
    }
    r.detail = os.str();
    return r;
}

// Byte-identical outputs at parallelism 1, 4 and 8 for the jp, ipk and
// density pipelines, each from a cold cache, driven through the CLI surface.
CriterionResult criterion_determinism(unsigned jobs) {
    CriterionResult r{8, "byte-identical outputs at parallelism 1, 4, 8", false, "", 0};
    (void)jobs;
    bool all_ok = true;
    std::vector<std::string> transcripts;
    for (unsigned degree : {1u, 4u, 8u}) {
        TempDir td("det" + std::to_string(degree));
        const std::string cache_dir = td.path.string();
        const std::string jobs_text = std::to_string(degree);
        std::ostringstream all;
        auto invoke = [&](std::vector<std::string> args) {
            args.push_back("--cache-dir");
            args.push_back(cache_dir);
            args.push_back("--jobs");
            args.push_back(jobs_text);
            std::ostringstream out, err;
            const int rc = cli::run(args, out, err);
            all_ok = all_ok && rc == 0;
            all << "$rc=" << rc << "\n" << out.str();
        };
        invoke({"jp", "3", "--bound", "10000"});
        invoke({"jp", "5", "--bound", "10000"});
        invoke({"jp", "7", "--bound", "110000"});
        for (const char* p : {"3", "5", "7"})
            for (const char* k : {"1", "2", "3"})
                invoke({"ipk", p, k, "--x", "5000", "--method", "both"});
        invoke({"ipk", "2", "1", "--x", "100", "--method", "both"});
        invoke({"ipk", "2", "2", "--x", "100", "--method", "both"});
        invoke({"density", "--x", "1e5", "--theta", "1/4", "--format", "csv"});
        transcripts.push_back(all.str());
    }
    r.pass = all_ok && transcripts[0] == transcripts[1] && transcripts[1] == transcripts[2];
    std::ostringstream os;
    os << "transcripts of " << transcripts[0].size() << " bytes "
       << (transcripts[0] == transcripts[1] && transcripts[1] == transcripts[2] ? "identical"
                                                                                : "DIFFER")
       << " across jobs 1/4/8" << (all_ok ? "" : ", with failing invocations");
    r.detail = os.str();
    return r;
}

} // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& progress, unsigned jobs,
                                            const std::set<int>& which) {
    using Runner = CriterionResult (*)(unsigned);
    const std::vector<Runner> runners = {
        criterion_jp_reproduction, criterion_j2_parity,      criterion_lemma_equivalence,
        criterion_engine_oracle,   criterion_counting_bounds, criterion_split_identity,
        criterion_density,         criterion_determinism};

    std::vector<CriterionResult> results;
    for (std::size_t i = 0; i < runners.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!which.empty() && which.find(id) == which.end()) continue;
        CriterionResult result;
        const auto start = std::chrono::steady_clock::now();
        try {
            result = runners[i](jobs);
        } catch (const std::exception& e) {
            result.id = id;
            result.name = "criterion " + std::to_string(id);
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        result.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        progress << (result.pass ? "PASS" : "FAIL") << "  " << result.id << ". " << result.name
                 << "  [" << result.detail << "]  (" << result.seconds << "s)\n";
        progress.flush();
        results.push_back(std::move(result));
    }
    return results;
}

} // namespace harmonic
