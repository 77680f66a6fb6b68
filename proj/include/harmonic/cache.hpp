#pragma once

// Persistent J_p tables: one structured text file per prime, keyed by
// (p, search_bound, schema version). A request past the cached bound extends
// the table from bound+1 instead of recomputing it. Single writer, shared
// readers within a process.

#include <filesystem>
#include <shared_mutex>

#include "harmonic/sets.hpp"

namespace harmonic {

inline constexpr int kJpCacheSchemaVersion = 1;

struct CacheError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class JpCache {
public:
    explicit JpCache(std::filesystem::path dir, EngineOptions opts = {});

    // Table for p with search_bound >= min_bound, loading, extending or
    // computing as needed; the result is persisted.
    JpTable ensure(std::uint64_t p, std::uint64_t min_bound);

    std::filesystem::path table_path(std::uint64_t p) const;
    const std::filesystem::path& dir() const { return dir_; }

    static JpTable read_table(const std::filesystem::path& file);
    static void write_table(const std::filesystem::path& file, const JpTable& table);

private:
    std::filesystem::path dir_;
    EngineOptions opts_;
    std::shared_mutex mutex_;
};

// Loaded tables are distrusted until a deterministic sample of members is
// re-verified against exact arithmetic; a mismatch raises CacheError.
void revalidate_table(const JpTable& table, std::uint64_t oracle_cap = kDefaultIndexCap);

} // namespace harmonic
