#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

// Counter-based random number generation. Every random variate consumed
// anywhere in the library is a pure function of (stream key, counter), so
// results are independent of thread count and scheduling order. Streams are
// derived from the master seed by hashing; distinct (seed, stream id) pairs
// give statistically independent sequences.

namespace chaosmeter::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// splitmix64 finalizer: a fast, well-mixed 64-bit permutation.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Derives an independent stream key from a parent key and a stream index.
inline std::uint64_t substream(std::uint64_t key, std::uint64_t stream) {
    return mix64(key ^ mix64(stream + 0xD1B54A32D192ED03ull));
}

/// The `index`-th 64-bit output of the stream identified by `key`.
inline std::uint64_t word_at(std::uint64_t key, std::uint64_t index) {
    return mix64(key + index * kGolden);
}

/// Uniform double in (0, 1], 53-bit resolution (never exactly 0, so it is
/// safe under log).
inline double uniform_open_closed(std::uint64_t word) {
    return static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
}

/// Uniform double in [0, 1).
inline double uniform_half_open(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

struct NormalPair {
    double first;
    double second;
};

/// Two independent standard normals from the pair counter `pair_index`,
/// via Box-Muller on words (2*pair_index, 2*pair_index + 1) of the stream.
inline NormalPair normal_pair(std::uint64_t key, std::uint64_t pair_index) {
    const double u1 = uniform_open_closed(word_at(key, 2 * pair_index));
    const double u2 = uniform_half_open(word_at(key, 2 * pair_index + 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

/// Fills `out` with standard normals, consuming pair counters starting at
/// `pair_base`. Uses ceil(out.size() / 2) counters.
inline void fill_normals(std::uint64_t key, std::uint64_t pair_base, std::span<double> out) {
    std::size_t i = 0;
    std::uint64_t ctr = pair_base;
    for (; i + 1 < out.size(); i += 2, ++ctr) {
        const NormalPair z = normal_pair(key, ctr);
        out[i] = z.first;
        out[i + 1] = z.second;
    }
    if (i < out.size()) out[i] = normal_pair(key, ctr).first;
}

/// Number of pair counters consumed by fill_normals for `count` values.
inline std::uint64_t pairs_for(std::uint64_t count) { return (count + 1) / 2; }

/// Uniform integer in [0, bound) from one counter word (multiply-shift).
inline std::uint64_t uniform_below(std::uint64_t key, std::uint64_t index, std::uint64_t bound) {
    const auto wide = static_cast<unsigned __int128>(word_at(key, index));
    return static_cast<std::uint64_t>((wide * bound) >> 64);
}

}  // namespace chaosmeter::rng
