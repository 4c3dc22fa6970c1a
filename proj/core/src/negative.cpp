#include "threatkg/negative.hpp"

#include "threatkg/error.hpp"

namespace tkg {

Triple sample_negative(const Triple& triple, std::size_t n_e, Rng& rng,
                       const TripleSet& train_set, NegativeSampleStats* stats) {
    if (n_e < 2) throw DomainError("negative sampling needs at least two entities");

    constexpr int kMaxRetries = 64;
    const bool corrupt_tail = rng.coin();
    const EntityId original = corrupt_tail ? triple.tail : triple.head;

    Triple corrupted = triple;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        // Uniform over the n_e - 1 entities other than the original.
        EntityId candidate = static_cast<EntityId>(rng.uniform_index(n_e - 1));
        if (candidate >= original) ++candidate;
        if (corrupt_tail) {
            corrupted.tail = candidate;
        } else {
            corrupted.head = candidate;
        }
        if (!train_set.contains(corrupted)) return corrupted;
    }
    if (stats) ++stats->possibly_true;
    return corrupted;
}

}  // namespace tkg
