#pragma once

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <thread>
#include <vector>

namespace gcflite {

/// Worker count for data-parallel loops. GCFLITE_THREADS overrides the
/// hardware default; values < 1 fall back to 1.
inline std::size_t worker_count() {
    static const std::size_t n = [] {
        if (const char* env = std::getenv("GCFLITE_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v >= 1) return static_cast<std::size_t>(v);
            return std::size_t{1};
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<std::size_t>(hw) : std::size_t{1};
    }();
    return n;
}

/// Split [0, n) into contiguous chunks and run f(begin, end) on each, one
/// chunk per worker. Callers must ensure chunks touch disjoint state; with
/// that restriction results are independent of the worker count, which keeps
/// seeded runs reproducible.
template <class F>
void parallel_blocks(std::size_t n, F&& f) {
    if (n == 0) return;
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1) {
        f(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        if (lo >= n) break;
        const std::size_t hi = std::min(lo + chunk, n);
        pool.emplace_back([&f, lo, hi] { f(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

} // namespace gcflite
