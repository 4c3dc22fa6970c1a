#include "threatkg/query.hpp"

#include <algorithm>
#include <sstream>

#include "threatkg/text.hpp"

namespace tkg {

std::vector<Prediction> complete(const LinkPredictor& model, const TripleStore& store,
                                 const IncompleteTriple& query, std::size_t k,
                                 bool exclude_known) {
    if (k == 0) throw DomainError("k must be >= 1");
    if (store.n_entities() != model.n_entities()) {
        throw DomainError("store/model vocabulary size mismatch");
    }
    if (query.known_entity >= store.n_entities()) throw DomainError("unknown entity id");
    if (query.relation >= model.n_relations()) throw DomainError("unknown relation id");

    const std::vector<double> scores =
        model.score_candidates(query.known_entity, query.relation, query.missing_slot);

    std::vector<EntityId> candidates;
    candidates.reserve(scores.size());
    std::span<const EntityId> known =
        query.missing_slot == Direction::tail
            ? store.known_tails(query.known_entity, query.relation)
            : store.known_heads(query.relation, query.known_entity);
    for (EntityId c = 0; c < store.n_entities(); ++c) {
        if (exclude_known && std::binary_search(known.begin(), known.end(), c)) continue;
        candidates.push_back(c);
    }

    std::sort(candidates.begin(), candidates.end(), [&](EntityId a, EntityId b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    if (candidates.size() > k) candidates.resize(k);

    std::vector<Prediction> out;
    out.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        Prediction p;
        p.entity = store.entity(candidates[i]);
        p.plausibility = scores[candidates[i]];
        p.confidence = model.confidence(p.plausibility);
        p.rank = static_cast<std::uint32_t>(i + 1);
        out.push_back(std::move(p));
    }
    return out;
}

IncompleteTriple resolve_query(const TripleStore& store, const std::string& entity_surface,
                               const std::string& relation_name, Direction missing) {
    IncompleteTriple q;
    q.missing_slot = missing;
    if (const auto e = store.find_entity(entity_surface)) {
        q.known_entity = *e;
    } else {
        std::string what = "unknown entity: \"" + entity_surface + "\"";
        const auto near = nearest_strings(entity_surface, store.entity_surfaces(), 2, 3);
        if (!near.empty()) {
            what += "; did you mean";
            for (const auto& s : near) what += " \"" + s + "\"";
            what += "?";
        }
        throw DomainError(what);
    }
    if (const auto r = store.find_relation(relation_name)) {
        q.relation = *r;
    } else {
        std::vector<std::string> names;
        for (const auto& r : store.relations()) names.push_back(r.name);
        std::string what = "unknown relation: \"" + relation_name + "\"";
        const auto near = nearest_strings(relation_name, names, 2, 3);
        if (!near.empty()) {
            what += "; did you mean";
            for (const auto& s : near) what += " \"" + s + "\"";
            what += "?";
        }
        throw DomainError(what);
    }
    return q;
}

std::vector<Triple> explain(const TripleStore& store, EntityId predicted,
                            EntityId query_entity, RelationId query_relation) {
    std::vector<Triple> out;
    for (const auto& t : store.triples()) {
        const bool touches_predicted = t.head == predicted || t.tail == predicted;
        const bool query_edge = t.relation == query_relation &&
                                (t.head == query_entity || t.tail == query_entity);
        if (touches_predicted || query_edge) out.push_back(t);
    }
    return out;
}

std::string predictions_to_table(std::span<const Prediction> preds) {
    std::size_t width = 17;  // at least the header column itself
    for (const auto& p : preds) width = std::max(width, p.entity.surface.size() + 2);

    std::ostringstream out;
    out << "Rank  ";
    out << "Inferred Entity";
    for (std::size_t i = 15; i < width; ++i) out << ' ';
    out << "Confidence\n";
    for (const auto& p : preds) {
        std::string rank = std::to_string(p.rank);
        out << rank;
        for (std::size_t i = rank.size(); i < 6; ++i) out << ' ';
        out << p.entity.surface;
        for (std::size_t i = p.entity.surface.size(); i < width; ++i) out << ' ';
        out << format_fixed(p.confidence, 4) << "\n";
    }
    return out.str();
}

std::string predictions_to_json(std::span<const Prediction> preds) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const auto& p = preds[i];
        if (i) out << ",";
        out << "{\"rank\":" << p.rank << ",\"entity\":\"" << json_escape(p.entity.surface)
            << "\",\"class\":\"" << json_escape(p.entity.class_name)
            << "\",\"plausibility\":" << format_exact(p.plausibility)
            << ",\"confidence\":" << format_exact(p.confidence) << "}";
    }
    out << "]";
    return out.str();
}

}  // namespace tkg
