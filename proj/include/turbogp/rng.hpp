#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace turbogp {

/// SplitMix64 finalizer: a bijective avalanche mix of one 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed splitting. The child seed for path (a, b, ...) under
/// `parent` is mix64(... mix64(mix64(parent ^ mix64(a)) ^ mix64(b)) ...).
/// Distinct paths give unrelated streams; the same path always gives the
/// same stream regardless of thread scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(parent);
    for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

/// Stream tags used when splitting a trial seed.
enum class Stream : std::uint64_t {
    kTruth = 1,
    kLocations = 2,
    kNoise = 3,
    kTrial = 4,
    kSweepPoint = 5,
};

constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream stream) {
    return derive_seed(parent, {static_cast<std::uint64_t>(stream)});
}

/// Engine used for every random draw in the library.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

}  // namespace turbogp
