#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "harmonic/cache.hpp"
#include "harmonic/rational.hpp"
#include "harmonic/sets.hpp"
#include "temp_dir.hpp"

using namespace harmonic;

namespace {

JpTable table_for(std::uint64_t p, std::uint64_t bound) {
    return compute_jp(p, bound, {}, /*spot_check=*/true);
}

std::vector<std::uint64_t> brute_im(std::uint64_t m, std::uint64_t x) {
    std::vector<std::uint64_t> out;
    HarmonicIterator it;
    for (std::uint64_t n = 1; n <= x; ++n) {
        if (n > 1) it.advance();
        if (!mpz_divisible_ui_p(it.value().denominator().get_mpz_t(),
                                static_cast<unsigned long>(m)))
            out.push_back(n);
    }
    return out;
}

} // namespace

TEST_CASE("J tables reproduce the published small sets") {
    CHECK(table_for(3, 2000).values_upto(2000) == std::vector<std::uint64_t>{2, 7, 22});
    CHECK(table_for(5, 3000).values_upto(3000) == std::vector<std::uint64_t>{4, 20, 24});
    CHECK(table_for(2, 5000).members.empty());
    CHECK_THROWS_AS(compute_jp(6, 100), std::invalid_argument);
}

TEST_CASE("closed-form enumeration matches the published I sets") {
    const JpTable j2 = table_for(2, 200);
    CHECK(enumerate_ipk_lemma(2, 1, 100, j2) == std::vector<std::uint64_t>{1});
    CHECK(enumerate_ipk_lemma(2, 2, 100, j2) == std::vector<std::uint64_t>{1, 2, 3});

    const JpTable j3 = table_for(3, 200);
    CHECK(enumerate_ipk_lemma(3, 1, 100, j3) ==
          std::vector<std::uint64_t>{1, 2, 6, 7, 8, 21, 22, 23, 66, 67, 68});

    const JpTable j5 = table_for(5, 200);
    CHECK(enumerate_ipk_lemma(5, 1, 30, j5) ==
          std::vector<std::uint64_t>{1, 2, 3, 4, 20, 21, 22, 23, 24});

    // everything below p^k belongs
    std::vector<std::uint64_t> all26(26);
    for (std::uint64_t i = 0; i < 26; ++i) all26[i] = i + 1;
    CHECK(enumerate_ipk_lemma(3, 3, 26, j3) == all26);

    // representations p^k*n1 + r never collide: already strictly ascending
    const auto i9 = enumerate_ipk_lemma(3, 2, 5000, table_for(3, 600));
    CHECK(std::adjacent_find(i9.begin(), i9.end(),
                             [](auto a, auto b) { return a >= b; }) == i9.end());
}

TEST_CASE("lemma route equals the direct valuation scan") {
    for (std::uint64_t p : {3ull, 5ull}) {
        const JpTable table = table_for(p, 500 / p + 1);
        for (unsigned k = 1; k <= 2; ++k) {
            CHECK(enumerate_ipk_lemma(p, k, 500, table) == enumerate_ipk_direct(p, k, 500));
        }
    }

    // deeper sweep for p = 7, covering the clusters seeded by the four-digit
    // J_7 members (7*2096 = 14672, 7*2390 = 16730)
    const JpTable j7 = table_for(7, 20'000 / 7 + 1);
    const auto lemma = enumerate_ipk_lemma(7, 1, 20'000, j7);
    CHECK(lemma == enumerate_ipk_direct(7, 1, 20'000));
    CHECK(std::binary_search(lemma.begin(), lemma.end(), 14672));
    CHECK(std::binary_search(lemma.begin(), lemma.end(), 16736));
    CHECK(!std::binary_search(lemma.begin(), lemma.end(), 14679));
}

TEST_CASE("J_p sits inside I_p and powers nest") {
    for (std::uint64_t p : {3ull, 5ull, 7ull}) {
        const JpTable table = table_for(p, 400);
        const auto ip = enumerate_ipk_lemma(p, 1, 400, table);
        for (std::uint64_t n : table.values_upto(400))
            CHECK(std::binary_search(ip.begin(), ip.end(), n));

        const auto ip2 = enumerate_ipk_lemma(p, 2, 400, table);
        for (std::uint64_t n : ip)
            CHECK(std::binary_search(ip2.begin(), ip2.end(), n));
    }
}

TEST_CASE("I_m as a union of prime-power parts") {
    JpTables tables;
    for (std::uint64_t p : {2ull, 3ull, 5ull}) tables.emplace(p, table_for(p, 300));

    CHECK(enumerate_im(2, 100, tables) == std::vector<std::uint64_t>{1});
    CHECK(enumerate_im(12, 100, tables) ==
          std::vector<std::uint64_t>{1, 2, 3, 6, 7, 8, 21, 22, 23, 66, 67, 68});
    CHECK(enumerate_im(9, 200, tables) == enumerate_ipk_lemma(3, 2, 200, tables.at(3)));

    CHECK_THROWS_AS(enumerate_im(1, 100, tables), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_im(14, 100, tables), CoverageError); // no table for 7

    // divisibility is inclusion: m | m' gives I_m within I_m'
    const auto i6 = enumerate_im(6, 300, tables);
    const auto i12 = enumerate_im(12, 300, tables);
    const auto i24 = enumerate_im(24, 300, tables);
    CHECK(std::includes(i12.begin(), i12.end(), i6.begin(), i6.end()));
    CHECK(std::includes(i24.begin(), i24.end(), i12.begin(), i12.end()));

    // exact denominators agree
    for (std::uint64_t m : {6ull, 12ull, 30ull})
        CHECK(enumerate_im(m, 300, tables) == brute_im(m, 300));
    JpTables wider;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull}) wider.emplace(p, table_for(p, 1000));
    for (std::uint64_t m : {12ull, 42ull, 49ull})
        CHECK(enumerate_im(m, 2000, wider) == brute_im(m, 2000));
}

TEST_CASE("count shortcut matches materialized enumeration") {
    const JpTable j3 = table_for(3, 700);
    for (std::uint64_t x : {1ull, 8ull, 26ull, 27ull, 100ull, 2000ull})
        for (unsigned k = 1; k <= 3; ++k)
            CHECK(count_ipk_lemma(3, k, x, j3) == enumerate_ipk_lemma(3, k, x, j3).size());
}

TEST_CASE("a too-small table is rejected, never silently truncated") {
    const JpTable j3 = table_for(3, 10);
    CHECK_THROWS_AS(enumerate_ipk_lemma(3, 1, 100, j3), CoverageError);
    CHECK_THROWS_AS(count_ipk_lemma(3, 1, 100, j3), CoverageError);
    CHECK_NOTHROW(enumerate_ipk_lemma(3, 1, 30, j3));
}

TEST_CASE("bound reports") {
    SetCountReport r2 = verify_bounds(2, 100, 1, 0);
    CHECK(r2.q == 2);
    CHECK(r2.pass);
    CHECK(r2.bound_thm1 > 1.0);
    CHECK(r2.bound_lemma22.has_value());
    CHECK(r2.bound_eq11.has_value());
    CHECK(r2.bound_sanna.has_value());

    SetCountReport r3 = verify_bounds(3, 100, 11, 3);
    CHECK(r3.pass);
    CHECK(*r3.bound_eq11 == doctest::Approx(3.0 * std::pow(100.0, 2.0 / 3.0 + 1.0 / (25.0 * std::log(3.0)))));

    SetCountReport r12 = verify_bounds(12, 100, 12, std::nullopt);
    CHECK(r12.q == 2);
    CHECK(r12.pass);
    CHECK(!r12.bound_lemma22.has_value());
    CHECK(!r12.bound_eq11.has_value());

    SetCountReport r9 = verify_bounds(9, 100, 26, std::nullopt);
    CHECK(r9.q == 3);
    CHECK(r9.bound_lemma22.has_value());
    CHECK(!r9.bound_eq11.has_value());

    // an impossible count fails the theorem bound
    SetCountReport bogus = verify_bounds(2, 100, 100000, std::nullopt);
    CHECK(!bogus.pass);
}

TEST_CASE("table cache round-trips, extends and revalidates") {
    TempDir td("cache");
    {
        JpCache cache(td.path);
        const JpTable t = cache.ensure(3, 100);
        CHECK(t.search_bound == 100);
        CHECK(t.values_upto(100) == std::vector<std::uint64_t>{2, 7, 22});
        CHECK(std::filesystem::exists(cache.table_path(3)));

        // warm load is identical
        CHECK(cache.ensure(3, 100).values_upto(100) == std::vector<std::uint64_t>{2, 7, 22});

        // a larger request extends rather than recomputes
        const JpTable wider = cache.ensure(3, 400);
        CHECK(wider.search_bound == 400);
        CHECK(wider.values_upto(400) == std::vector<std::uint64_t>{2, 7, 22});
    }
    {
        // file round-trip is lossless
        JpCache cache(td.path);
        const JpTable loaded = JpCache::read_table(cache.table_path(3));
        CHECK(loaded.p == 3);
        CHECK(loaded.search_bound == 400);
        CHECK(loaded.members.size() == 3);
        CHECK(loaded.members[0].engine == MemberEngine::padic);
    }
    {
        // corrupt members are caught by revalidation on load
        JpCache cache(td.path);
        std::ofstream f(cache.table_path(3), std::ios::trunc);
        f << "schema_version: 1\np: 3\nsearch_bound: 400\ncount: 3\n3 padic\n8 padic\n9 padic\n";
        f.close();
        CHECK_THROWS_AS(cache.ensure(3, 100), CacheError);
    }
    {
        // schema mismatches are refused
        JpCache cache(td.path);
        std::ofstream f(cache.table_path(3), std::ios::trunc);
        f << "schema_version: 99\np: 3\nsearch_bound: 400\ncount: 0\n";
        f.close();
        CHECK_THROWS_AS(cache.ensure(3, 100), CacheError);
    }
}
