#pragma once

#include <cmath>
#include <cstdint>

namespace tvscg {

// Counter-based generator: every draw is a pure function of (seed, counter), so
// streams are reproducible across platforms and independent of call order.

/// SplitMix64 finalizer applied to the n-th element of stream `seed`.
inline uint64_t mix64(uint64_t seed, uint64_t n) {
    uint64_t z = seed + (n + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform draw in [0, 1) with 53-bit resolution.
inline double uniform01(uint64_t seed, uint64_t n) {
    return static_cast<double>(mix64(seed, n) >> 11) * 0x1.0p-53;
}

/// n-th standard normal draw of stream `seed` (Box-Muller, cosine branch).
inline double gaussian(uint64_t seed, uint64_t n) {
    // 1 - u in (0, 1] keeps the log argument away from zero.
    double u1 = 1.0 - uniform01(seed, 2 * n);
    double u2 = uniform01(seed, 2 * n + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

} // namespace tvscg
