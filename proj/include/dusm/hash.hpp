#pragma once

#include <cstdint>

namespace dusm {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded 64-bit hash over an ordered tuple of integers. Stable across runs
/// and platforms; used for ECMP choice, packet keys, tree matching and RP
/// selection.
template <typename... Parts>
constexpr std::uint64_t stable_hash(Parts... parts) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    ((h = mix64(h ^ static_cast<std::uint64_t>(parts))), ...);
    return h;
}

}  // namespace dusm
