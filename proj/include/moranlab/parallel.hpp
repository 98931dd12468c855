#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace moranlab {

// Worker count: MORANLAB_THREADS if set and positive, otherwise hardware
// concurrency, never less than 1.
inline unsigned thread_count() {
    if (const char* env = std::getenv("MORANLAB_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1u;
}

// Static block partition of [0, n). Each worker owns a contiguous range,
// so any per-index output written into a preallocated buffer is identical
// for every thread count; reductions over that buffer must be done
// serially by the caller to keep results bit-stable.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& body) {
    unsigned workers = thread_count();
    if (workers <= 1 || n < 2048) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = static_cast<std::size_t>(w) * chunk;
        std::size_t end = begin + chunk < n ? begin + chunk : n;
        if (begin >= end) break;
        pool.emplace_back([begin, end, &body] {
            for (std::size_t i = begin; i < end; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace moranlab
