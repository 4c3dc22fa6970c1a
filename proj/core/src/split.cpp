#include "threatkg/split.hpp"

#include <cmath>

#include "threatkg/rng.hpp"

namespace tkg {

SplitResult split_triples(const TripleStore& store, SplitRatios ratios, std::uint64_t seed) {
    if (ratios.train <= 0.0 || ratios.valid <= 0.0 || ratios.test <= 0.0) {
        throw DomainError("split ratios must be positive");
    }
    const double sum = ratios.train + ratios.valid + ratios.test;
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw DomainError("split ratios must sum to 1 (got " + std::to_string(sum) + ")");
    }
    const std::size_t n_t = store.n_triples();
    if (n_t < 3) {
        throw DomainError("cannot split " + std::to_string(n_t) +
                          " triples into three non-empty parts");
    }

    std::vector<Triple> shuffled(store.triples().begin(), store.triples().end());
    Rng rng(seed);
    rng.shuffle(shuffled);

    const std::size_t n_valid = static_cast<std::size_t>(
        std::floor(ratios.valid * static_cast<double>(n_t)));
    const std::size_t n_test = static_cast<std::size_t>(
        std::floor(ratios.test * static_cast<double>(n_t)));
    // floor(train) plus whatever the floors left over
    const std::size_t n_train = n_t - n_valid - n_test;

    SplitResult out;
    out.train.assign(shuffled.begin(), shuffled.begin() + n_train);
    out.valid.assign(shuffled.begin() + n_train, shuffled.begin() + n_train + n_valid);
    out.test.assign(shuffled.begin() + n_train + n_valid, shuffled.end());
    return out;
}

}  // namespace tkg
