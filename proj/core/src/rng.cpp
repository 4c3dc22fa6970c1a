#include "threatkg/rng.hpp"

#include <cmath>

namespace tkg {

std::uint64_t Rng::uniform_index(std::uint64_t bound) {
    // Threshold rejection: discard draws below 2^64 mod bound.
    const std::uint64_t threshold = (0ull - bound) % bound;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x >= threshold) return x % bound;
    }
}

double Rng::normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform_real();  // (0, 1], keeps log finite
    const double u2 = uniform_real();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return mean + stddev * mag * std::cos(two_pi * u2);
}

}  // namespace tkg
