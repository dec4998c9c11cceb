#pragma once

#include <cstdint>
#include <random>

namespace perclr {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ splitmix64(v + 0x632be59bd9b4e019ULL));
}

/// Top 53 bits mapped to [0,1).
constexpr double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Stream tags keep unrelated uses of the same seed apart.
inline constexpr std::uint64_t kStreamFast = 0x66617374ULL;
inline constexpr std::uint64_t kStreamContinuum = 0x636f6e74ULL;
inline constexpr std::uint64_t kStreamHarris = 0x68617272ULL;
inline constexpr std::uint64_t kStreamChi = 0x6368692dULL;
inline constexpr std::uint64_t kStreamBootstrap = 0x626f6f74ULL;

/// Per-replica key. Replicas of one seed never collide.
constexpr std::uint64_t replica_key(std::uint64_t seed, std::uint64_t replica) {
    return seed ^ replica;
}

inline std::mt19937_64 make_engine(std::uint64_t key, std::uint64_t tag) {
    const std::uint64_t k = mix(key, tag);
    std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace perclr
