#pragma once

#include "threatkg/rng.hpp"
#include "threatkg/triple_store.hpp"

namespace tkg {

struct NegativeSampleStats {
    std::size_t possibly_true = 0;  // corruptions accepted after retry budget
};

// Corrupts head or tail (fair coin) with a uniformly random different entity
// such that the corrupted triple is absent from `train_set`. After 64 failed
// retries the last corruption is accepted and counted as possibly true.
Triple sample_negative(const Triple& triple, std::size_t n_e, Rng& rng,
                       const TripleSet& train_set, NegativeSampleStats* stats = nullptr);

}  // namespace tkg
