#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace harmonic {

// Runs fn(i) for every i in [0, count). Work items are indexed, and any
// exceptions come back keyed by index, so callers observe the same outcome
// for every jobs value. jobs == 1 runs inline.
inline std::vector<std::exception_ptr>
parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(count);
    if (count == 0) return errors;
    if (jobs <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try { fn(i); } catch (...) { errors[i] = std::current_exception(); }
        }
        return errors;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try { fn(i); } catch (...) { errors[i] = std::current_exception(); }
        }
    };
    std::vector<std::jthread> pool;
    const std::size_t nthreads = std::min<std::size_t>(jobs, count);
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    pool.clear(); // join
    return errors;
}

} // namespace harmonic
