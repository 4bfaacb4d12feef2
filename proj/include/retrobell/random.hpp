#pragma once

#include <cstdint>
#include <random>

namespace retrobell {

// Explicit random stream passed by reference into every stochastic routine.
using RandomStream = std::mt19937_64;

// splitmix64 finalizer over (master, index). Used to derive independent
// per-chunk / per-grid-point streams so results do not depend on scheduling.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) noexcept;

inline RandomStream make_stream(std::uint64_t master, std::uint64_t index = 0) {
    return RandomStream(mix_seed(master, index));
}

// Uniform double in [0, 1) built from the top 53 bits; portable across
// standard library implementations, unlike std::uniform_real_distribution.
inline double uniform01(RandomStream& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool fair_coin(RandomStream& rng) { return (rng() >> 63) != 0; }

// Exact uniform integer in [0, n) by rejection.
std::uint64_t uniform_index(RandomStream& rng, std::uint64_t n);

}  // namespace retrobell
