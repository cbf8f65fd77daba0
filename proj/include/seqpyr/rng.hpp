#pragma once

#include <cstdint>
#include <random>

// Deterministic random utilities. Engine output of std::mt19937_64 is
// pinned by the standard, but the standard *distributions* are not, so
// everything here maps raw engine draws to values by hand. Runs must be
// bit-reproducible across platforms.

namespace seqpyr {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent per-purpose seed derived from a run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

// Uniform double in [0,1) from one engine draw.
inline double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0,n) by rejection, unbiased.
inline std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = rng();
    while (x >= limit) {
        x = rng();
    }
    return x % n;
}

}  // namespace seqpyr
