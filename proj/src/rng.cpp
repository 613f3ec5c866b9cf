#include "xy/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xy::rng {

std::vector<double> gaussianVector(std::uint64_t seed, int n) {
    if (n < 0) throw std::invalid_argument("gaussianVector: negative count");
    std::mt19937_64 gen(seed);
    std::vector<double> out;
    out.reserve(n);
    while (static_cast<int>(out.size()) < n) {
        const double u1 = nextUnitOpen01(gen);
        const double u2 = nextUnitOpen01(gen);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        out.push_back(r * std::cos(phi));
        if (static_cast<int>(out.size()) < n) out.push_back(r * std::sin(phi));
    }
    return out;
}

std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<double> biasedAngles(std::uint64_t seed, int n, double center,
                                 double halfWidth) {
    if (n < 0) throw std::invalid_argument("biasedAngles: negative count");
    std::mt19937_64 gen(seed);
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.push_back(center + (2.0 * nextUnitOpen01(gen) - 1.0) * halfWidth);
    return out;
}

}  // namespace xy::rng
