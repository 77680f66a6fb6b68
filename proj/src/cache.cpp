#include "harmonic/cache.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "harmonic/primes.hpp"

namespace harmonic {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t parse_field(std::istream& in, const std::string& key) {
    std::string name, value;
    if (!(in >> name >> value) || name != key + ":")
        throw CacheError("J table file: expected field '" + key + "'");
    return std::stoull(value);
}

} // namespace

void revalidate_table(const JpTable& table, std::uint64_t oracle_cap) {
    // Keep warm loads cheap: sample only members the oracle reaches quickly.
    constexpr std::uint64_t kCheapOracle = 20'000;
    std::vector<std::uint64_t> cheap;
    for (const auto& m : table.members)
        if (m.n <= kCheapOracle && m.n <= oracle_cap) cheap.push_back(m.n);
    if (cheap.empty()) return;
    std::uint64_t seed = splitmix64(table.p ^ (table.search_bound << 20) ^ cheap.size());
    const std::size_t samples = std::min<std::size_t>(3, cheap.size());
    for (std::size_t i = 0; i < samples; ++i) {
        seed = splitmix64(seed);
        const std::uint64_t n = cheap[seed % cheap.size()];
        if (nu_rat(harmonic_number(n, oracle_cap), table.p) < 1)
            throw CacheError("cached J table for p=" + std::to_string(table.p) +
                             " failed oracle revalidation at n=" + std::to_string(n));
    }
}

JpCache::JpCache(std::filesystem::path dir, EngineOptions opts)
    : dir_(std::move(dir)), opts_(opts) {}

std::filesystem::path JpCache::table_path(std::uint64_t p) const {
    return dir_ / ("jp_" + std::to_string(p) + ".table");
}

JpTable JpCache::read_table(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw CacheError("cannot open J table file: " + file.string());
    JpTable table;
    const auto version = parse_field(in, "schema_version");
    if (version != kJpCacheSchemaVersion)
        throw CacheError("J table file has schema_version " + std::to_string(version) +
                         ", expected " + std::to_string(kJpCacheSchemaVersion));
    table.p = parse_field(in, "p");
    table.search_bound = parse_field(in, "search_bound");
    const auto count = parse_field(in, "count");
    table.members.reserve(count);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t n;
        std::string tag;
        if (!(in >> n >> tag)) throw CacheError("J table file truncated: " + file.string());
        if (n <= prev || n > table.search_bound)
            throw CacheError("J table file has out-of-order or out-of-range member");
        table.members.push_back({n, member_engine_from_string(tag)});
        prev = n;
    }
    return table;
}

void JpCache::write_table(const std::filesystem::path& file, const JpTable& table) {
    std::filesystem::create_directories(file.parent_path());
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw CacheError("cannot write J table file: " + tmp);
        out << "schema_version: " << kJpCacheSchemaVersion << "\n"
            << "p: " << table.p << "\n"
            << "search_bound: " << table.search_bound << "\n"
            << "count: " << table.members.size() << "\n";
        for (const auto& m : table.members) out << m.n << " " << to_string(m.engine) << "\n";
        if (!out) throw CacheError("short write on J table file: " + tmp);
    }
    std::filesystem::rename(tmp, file);
}

JpTable JpCache::ensure(std::uint64_t p, std::uint64_t min_bound) {
    if (!is_prime(p)) throw std::invalid_argument("JpCache::ensure: p must be prime");
    if (min_bound < 1) min_bound = 1;

    {
        std::shared_lock read(mutex_);
        if (std::filesystem::exists(table_path(p))) {
            JpTable table = read_table(table_path(p));
            if (table.p != p) throw CacheError("J table file is for a different prime");
            revalidate_table(table, opts_.oracle_cap);
            if (table.search_bound >= min_bound) return table;
        }
    }

    std::unique_lock write(mutex_);
    JpTable table;
    if (std::filesystem::exists(table_path(p))) {
        table = read_table(table_path(p));
        if (table.search_bound >= min_bound) return table;
        extend_jp(table, min_bound, opts_);
    } else {
        table = compute_jp(p, min_bound, opts_);
    }
    write_table(table_path(p), table);
    return table;
}

} // namespace harmonic
