#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Small deterministic RNG helpers.  All randomness in the library flows
// through these so that a (seed, stream) pair fully determines every draw,
// independent of platform quirks in the standard distributions.

namespace adoptnet {

// One step of the splitmix64 generator; good for turning loosely related
// integers (seed, stream index, retry counter) into well-mixed engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Engine for (seed, stream).  Distinct streams are statistically independent,
// so per-path or per-attempt engines can be created in any order.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state ^= 0x6A09E667F3BCC909ULL + stream * 0x9E3779B97F4A7C15ULL;
    std::uint64_t b = splitmix64(state);
    return std::mt19937_64(a ^ (b << 1));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).  Rejection sampling keeps the draw unbiased.
inline std::size_t uniform_index(std::mt19937_64& eng, std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

// Standard normal via Box-Muller.  Uses one value per pair of uniforms;
// simple and stateless, which keeps replay behaviour easy to reason about.
inline double normal01(std::mt19937_64& eng) {
    double u1 = uniform01(eng);
    while (u1 <= 0.0) {
        u1 = uniform01(eng);
    }
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

} // namespace adoptnet
