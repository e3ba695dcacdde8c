#pragma once

#include <cstdint>

namespace advdir {

// Stable splitmix64-style combiner for deriving independent RNG streams from
// one user-facing seed. Part of the reproducibility contract: outputs for a
// given seed must not change.
inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace advdir
