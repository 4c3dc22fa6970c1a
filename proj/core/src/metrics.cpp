#include "threatkg/metrics.hpp"

#include <algorithm>
#include <sstream>

#include "threatkg/text.hpp"

namespace tkg {

std::string_view rank_mode_name(RankMode m) {
    return m == RankMode::raw ? "raw" : "filtered";
}

std::uint32_t rank_of_true_entity(const LinkPredictor& model, EntityId known, RelationId rel,
                                  Direction missing, EntityId truth, const TripleStore& store,
                                  RankMode mode) {
    const std::size_t n_e = model.n_entities();
    if (known >= n_e || truth >= n_e) throw DomainError("entity id out of range");
    if (rel >= model.n_relations()) throw DomainError("relation id out of range");

    const std::vector<double> scores = model.score_candidates(known, rel, missing);
    const double truth_score = scores[truth];

    // Known-true competitors for filtering come straight off the indexes.
    std::span<const EntityId> known_true;
    if (mode == RankMode::filtered) {
        known_true = missing == Direction::tail ? store.known_tails(known, rel)
                                                : store.known_heads(rel, known);
    }
    const auto is_known_true = [&](EntityId c) {
        return std::binary_search(known_true.begin(), known_true.end(), c);
    };

    std::size_t better = 0;
    std::size_t equal_others = 0;
    for (EntityId c = 0; c < n_e; ++c) {
        if (c == truth) continue;
        if (mode == RankMode::filtered && is_known_true(c)) continue;
        if (scores[c] > truth_score) {
            ++better;
        } else if (scores[c] == truth_score) {
            ++equal_others;
        }
    }
    // Mean tie position, rounded half up.
    return static_cast<std::uint32_t>(1 + better + (equal_others + 1) / 2);
}

MetricsReport aggregate_ranks(std::vector<RankedTriple> ranks, RankMode mode) {
    if (ranks.empty()) throw DomainError("cannot aggregate an empty rank list");
    MetricsReport rep;
    rep.mode = mode;
    std::size_t h1 = 0, h3 = 0, h10 = 0;
    double rank_sum = 0.0, recip_sum = 0.0;
    for (const auto& r : ranks) {
        if (r.rank < 1) throw DomainError("ranks must be >= 1");
        h1 += r.rank <= 1;
        h3 += r.rank <= 3;
        h10 += r.rank <= 10;
        rank_sum += static_cast<double>(r.rank);
        recip_sum += 1.0 / static_cast<double>(r.rank);
    }
    const double n = static_cast<double>(ranks.size());
    rep.hits1 = 100.0 * static_cast<double>(h1) / n;
    rep.hits3 = 100.0 * static_cast<double>(h3) / n;
    rep.hits10 = 100.0 * static_cast<double>(h10) / n;
    rep.mr = rank_sum / n;
    rep.mrr = recip_sum / n;
    rep.per_triple_ranks = std::move(ranks);
    return rep;
}

MetricsReport evaluate(const LinkPredictor& model, std::span<const Triple> test,
                       const TripleStore& store, RankMode mode) {
    if (test.empty()) throw DomainError("empty test set");
    if (store.n_entities() != model.n_entities()) {
        throw DomainError("store/model vocabulary size mismatch");
    }

    std::vector<RankedTriple> ranks;
    ranks.reserve(test.size() * 2);
    for (const auto& t : test) {
        if (t.head >= store.n_entities() || t.tail >= store.n_entities() ||
            t.relation >= store.n_relations()) {
            throw DomainError("test triple references unknown vocabulary");
        }
        ranks.push_back({t, Direction::tail,
                         rank_of_true_entity(model, t.head, t.relation, Direction::tail, t.tail,
                                             store, mode)});
        ranks.push_back({t, Direction::head,
                         rank_of_true_entity(model, t.tail, t.relation, Direction::head, t.head,
                                             store, mode)});
    }
    return aggregate_ranks(std::move(ranks), mode);
}

std::string MetricsReport::to_table() const {
    std::ostringstream out;
    out << "Hits@1↑  Hits@3↑  Hits@10↑  MR↓      MRR↑    ("
        << rank_mode_name(mode) << ", " << per_triple_ranks.size() << " ranks)\n";
    const auto cell = [](const std::string& s, std::size_t width) {
        std::string padded = s;
        while (padded.size() < width) padded += ' ';
        return padded;
    };
    out << cell(format_fixed(hits1, 2), 8) << cell(format_fixed(hits3, 2), 8)
        << cell(format_fixed(hits10, 2), 9) << cell(format_fixed(mr, 2), 8)
        << format_fixed(mrr, 4) << "\n";
    return out.str();
}

std::string MetricsReport::to_json() const {
    std::ostringstream out;
    out << "{\"mode\":\"" << rank_mode_name(mode) << "\",\"hits1\":" << format_exact(hits1)
        << ",\"hits3\":" << format_exact(hits3) << ",\"hits10\":" << format_exact(hits10)
        << ",\"mr\":" << format_exact(mr) << ",\"mrr\":" << format_exact(mrr) << ",\"ranks\":[";
    for (std::size_t i = 0; i < per_triple_ranks.size(); ++i) {
        const auto& r = per_triple_ranks[i];
        if (i) out << ",";
        out << "{\"head\":" << r.triple.head << ",\"relation\":" << r.triple.relation
            << ",\"tail\":" << r.triple.tail << ",\"direction\":\""
            << (r.direction == Direction::tail ? "tail" : "head") << "\",\"rank\":" << r.rank
            << "}";
    }
    out << "]}";
    return out.str();
}

}  // namespace tkg
