#pragma once

#include <cstdint>
#include <vector>

#include "threatkg/triple_store.hpp"

namespace tkg {

struct SplitRatios {
    double train = 0.70;
    double valid = 0.15;
    double test = 0.15;
};

struct SplitResult {
    std::vector<Triple> train;
    std::vector<Triple> valid;
    std::vector<Triple> test;
};

// Deterministic shuffle under `seed`, then consecutive slices. Sizes are
// floor(ratio * n_t) with the remainder assigned to train. Ratios must be
// positive and sum to 1 within 1e-9; n_t >= 3 required.
SplitResult split_triples(const TripleStore& store, SplitRatios ratios, std::uint64_t seed);

}  // namespace tkg
