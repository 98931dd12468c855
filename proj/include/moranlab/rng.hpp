#pragma once

#include <cstdint>

namespace moranlab {

// splitmix64: tiny, statistically solid, and trivially seedable — ideal
// for per-sample counter-derived streams where reproducibility must not
// depend on thread scheduling.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

// Derive an independent stream for (seed, index). Two scrambling rounds
// decorrelate adjacent indices; the result depends only on the pair, so
// any parallel schedule reproduces the same stream set.
inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (index * 0xda942042e4dd58b5ULL + 0x9e3779b97f4a7c15ULL));
    std::uint64_t s = g.next_u64();
    s ^= SplitMix64(index).next_u64();
    return SplitMix64(s);
}

} // namespace moranlab
