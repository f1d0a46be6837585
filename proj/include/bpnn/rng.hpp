#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace bpnn {

// Seeded RNG helpers. Distributions are hand-mapped from raw mt19937_64
// output so that the same seed yields the same stream on every platform
// (std::uniform_*_distribution output is implementation-defined).

inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + uniform_unit(rng) * (hi - lo);
}

// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Standard normal via Box-Muller (one value per call, cosine branch).
inline double standard_normal(std::mt19937_64& rng) {
    double u1 = uniform_unit(rng);
    while (u1 <= 0.0) u1 = uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    const double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Fisher-Yates shuffle driven by uniform_below.
template <typename T>
void shuffle_inplace(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace bpnn
