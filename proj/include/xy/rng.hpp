#pragma once

#include <cstdint>
#include <random>
#include <vector>

// Pinned random-number recipes. Everything that consumes entropy in this
// codebase goes through these helpers so that a (seed, N) pair maps to the
// same numbers on every platform and in every future version:
//
//   engine       std::mt19937_64 (sequence fixed by the C++ standard)
//   uniform      u = ((x >> 11) + 1) * 2^-53  in (0, 1]
//   gaussian     Box-Muller pairs: r = sqrt(-2 ln u1),
//                z1 = r cos(2 pi u2), z2 = r sin(2 pi u2)
//   seed split   splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15)
//
// std::normal_distribution and friends are deliberately avoided: their
// algorithms are implementation-defined and would break seed portability.

namespace xy::rng {

// Map a raw 64-bit draw to (0, 1]; the +1 keeps log(u) finite.
inline double unitOpen01(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

inline double nextUnitOpen01(std::mt19937_64& gen) { return unitOpen01(gen()); }

// n independent N(0,1) draws via Box-Muller; an odd n discards the sine
// member of the final pair.
std::vector<double> gaussianVector(std::uint64_t seed, int n);

// Per-realization seeds from a master seed. splitmix64 of staggered
// increments of the golden-ratio constant; indices need not be contiguous.
std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t index);

// Angles center + (2u - 1) * halfWidth, one uniform draw per site.
std::vector<double> biasedAngles(std::uint64_t seed, int n, double center,
                                 double halfWidth);

}  // namespace xy::rng
