#pragma once

#include <cstdint>
#include <random>

namespace srlda {

/// SplitMix64 finaliser.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of an independent stream: mix64(mix64(master + group) + index).
/// `group` separates experiment cells (e.g. training size), `index` the
/// repetition, so every repetition owns its stream regardless of scheduling.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t group, std::uint64_t index) {
    return mix64(mix64(master + group) + index);
}

using Rng = std::mt19937_64;

} // namespace srlda
