#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tkg {

// Deterministic RNG used everywhere randomness is needed. mt19937_64 supplies
// the bit stream; the distributions are hand-rolled because the standard
// library's are implementation-defined and would break cross-toolchain
// reproducibility of splits, inits and sampling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Unbiased integer in [0, bound), bound > 0. Rejection sampling.
    std::uint64_t uniform_index(std::uint64_t bound);

    // Uniform double in [0, 1) with 53 random bits.
    double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

    // Box-Muller. Draws exactly two u64 per call (no cached spare).
    double normal(double mean = 0.0, double stddev = 1.0);

    // Bernoulli(p_true).
    bool coin(double p_true = 0.5) { return uniform_real() < p_true; }

    // Fisher-Yates with our own index draw.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Independent child stream, deterministic in (parent state, salt).
    Rng fork(std::uint64_t salt) {
        return Rng(next_u64() ^ (salt * 0x9E3779B97F4A7C15ull));
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace tkg
