#pragma once

#include <cstdint>
#include <random>

namespace bwc {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Standard normal via Box-Muller on uniform01.
double standard_normal(Rng& rng);

}  // namespace bwc
