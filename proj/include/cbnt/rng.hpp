#pragma once

// Seed plumbing. Every random decision in the library draws from an engine
// seeded by derive(root, "stream-name", index...), so results depend only on
// the root seed and never on evaluation order or thread count.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace cbnt::rng {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive(std::uint64_t seed, std::string_view stream) {
    return derive(seed, fnv1a(stream));
}

inline Engine engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, bound) by rejection; bound > 0.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % bound;
}

// Index drawn from a probability row (entries sum to 1).
inline int categorical(Engine& eng, std::span<const double> probs) {
    double u = uniform01(eng);
    const int last = static_cast<int>(probs.size()) - 1;
    for (int i = 0; i < last; ++i) {
        if (u < probs[i]) return i;
        u -= probs[i];
    }
    // Guard against rounding: fall back to the last atom with positive mass.
    for (int i = last; i > 0; --i)
        if (probs[i] > 0.0) return i;
    return 0;
}

} // namespace cbnt::rng
