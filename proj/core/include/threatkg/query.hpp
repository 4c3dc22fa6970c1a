#pragma once

#include <span>
#include <string>
#include <vector>

#include "threatkg/model.hpp"
#include "threatkg/triple_store.hpp"

namespace tkg {

struct IncompleteTriple {
    EntityId known_entity = 0;
    RelationId relation = 0;
    Direction missing_slot = Direction::tail;
};

struct Prediction {
    Entity entity;
    double plausibility = 0.0;
    double confidence = 0.0;     // in [0, 1], non-increasing down the list
    std::uint32_t rank = 0;      // contiguous from 1
};

// Completes an incomplete triple with a ranked, confidence-scored entity
// list. Ordering is plausibility-descending with ties broken by entity id
// ascending; `exclude_known` drops entities already linked to the query
// (entity, relation) pair so only new facts surface.
std::vector<Prediction> complete(const LinkPredictor& model, const TripleStore& store,
                                 const IncompleteTriple& query, std::size_t k,
                                 bool exclude_known = false);

// Resolves surfaces to an id-level query; unknown names raise a DomainError
// carrying near-miss suggestions (edit distance <= 2).
IncompleteTriple resolve_query(const TripleStore& store, const std::string& entity_surface,
                               const std::string& relation_name, Direction missing);

// Supporting evidence: every stored triple incident to the predicted entity,
// plus the query entity's triples under the query relation. Pure index
// lookups over the (training) store.
std::vector<Triple> explain(const TripleStore& store, EntityId predicted,
                            EntityId query_entity, RelationId query_relation);

std::string predictions_to_table(std::span<const Prediction> preds);
std::string predictions_to_json(std::span<const Prediction> preds);

}  // namespace tkg
