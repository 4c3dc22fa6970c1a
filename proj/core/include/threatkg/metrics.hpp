#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "threatkg/model.hpp"
#include "threatkg/triple_store.hpp"

namespace tkg {

enum class RankMode { raw, filtered };

std::string_view rank_mode_name(RankMode m);

struct RankedTriple {
    Triple triple;
    Direction direction = Direction::tail;  // which slot was predicted
    std::uint32_t rank = 0;
};

// Per-triple ranks and the aggregate ranking metrics. Hits@n are percentages.
struct MetricsReport {
    double hits1 = 0.0;
    double hits3 = 0.0;
    double hits10 = 0.0;
    double mr = 0.0;   // mean rank
    double mrr = 0.0;  // mean reciprocal rank
    std::vector<RankedTriple> per_triple_ranks;
    RankMode mode = RankMode::filtered;

    // Paper-style table: Hits@1^ Hits@3^ Hits@10^ MR(v) MRR^.
    std::string to_table() const;
    std::string to_json() const;
};

// Rank of the true entity among all n_e candidates substituted into the
// missing slot. Filtered mode removes candidates (other than the truth) that
// form a triple already present in the store. Ties take the mean position,
// rounded half up: rank = 1 + #better + floor((#equal_others + 1) / 2).
std::uint32_t rank_of_true_entity(const LinkPredictor& model, EntityId known, RelationId rel,
                                  Direction missing, EntityId truth, const TripleStore& store,
                                  RankMode mode);

// Ranked-candidate evaluation: every test triple contributes a tail-query
// rank and a head-query rank; aggregates are exact means over all ranks.
MetricsReport evaluate(const LinkPredictor& model, std::span<const Triple> test,
                       const TripleStore& store, RankMode mode);

// Aggregation used by evaluate(), exposed for reuse on raw rank lists.
MetricsReport aggregate_ranks(std::vector<RankedTriple> ranks, RankMode mode);

}  // namespace tkg
