// Counter-based reproducible Gaussian noise.
//
// Generator: the SplitMix64 finalizer evaluated at stream position
// seed + (counter+1)*golden, feeding a Box-Muller transform. Each sample is a
// pure function of (seed, k), so records regenerate bit-exactly for a given
// seed and samples may be produced in any order or concurrently with
// identical results. Integer mixing is exact on every platform; the only
// platform dependence left is the libm sqrt/log/cos rounding.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace cbw {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * 0x9E3779B97F4A7C15ULL);
}

// Uniform in (0, 1]; never 0, so log() below is safe.
inline double uniform_open(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Uniform in [0, 1).
inline double uniform_half_open(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Standard normal draw keyed by (seed, k).
inline double gaussian(std::uint64_t seed, std::uint64_t k) {
    const double u1 = uniform_open(counter_hash(seed, 2 * k));
    const double u2 = uniform_half_open(counter_hash(seed, 2 * k + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Per-trial seed derivation for Monte Carlo runs.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return counter_hash(master_seed, index);
}

}  // namespace cbw
