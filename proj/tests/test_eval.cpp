#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <threatkg/metrics.hpp>
#include <threatkg/text.hpp>

#include "helpers.hpp"

using namespace tkg;
using namespace tkgtest;

namespace {

// Test double with a fully materialized score table; quantization forces ties.
class TableModel final : public LinkPredictor {
public:
    TableModel(std::size_t n_e, std::size_t n_r, std::uint64_t seed, bool quantize) {
        Rng rng(seed);
        table_.resize(n_e * n_r * n_e);
        for (auto& x : table_) {
            x = rng.uniform_real(-2.0, 2.0);
            if (quantize) x = std::round(x * 2.0) / 2.0;
        }
        n_e_ = n_e;
        n_r_ = n_r;
    }

    ModelKind kind() const override { return ModelKind::tucker; }
    std::size_t n_entities() const override { return n_e_; }
    std::size_t n_relations() const override { return n_r_; }

    double score(EntityId h, RelationId r, EntityId t) const override {
        return table_[(h * n_r_ + r) * n_e_ + t];
    }

    std::vector<double> score_candidates(EntityId known, RelationId rel,
                                         Direction missing) const override {
        std::vector<double> out(n_e_);
        for (EntityId c = 0; c < n_e_; ++c) {
            out[c] = missing == Direction::tail ? score(known, rel, c) : score(c, rel, known);
        }
        return out;
    }

    double confidence(double p) const override { return sigmoid(p); }

private:
    std::vector<double> table_;
    std::size_t n_e_ = 0, n_r_ = 0;
};

// Independent oracle: sorts the full survivor list and averages the tied
// block's positions directly.
std::uint32_t brute_force_rank(const LinkPredictor& model, EntityId known, RelationId rel,
                               Direction missing, EntityId truth, const TripleStore& store,
                               RankMode mode) {
    const auto scores = model.score_candidates(known, rel, missing);
    std::vector<std::pair<double, EntityId>> survivors;
    for (EntityId c = 0; c < scores.size(); ++c) {
        if (mode == RankMode::filtered && c != truth) {
            const Triple formed = missing == Direction::tail ? Triple{known, rel, c}
                                                             : Triple{c, rel, known};
            if (store.contains(formed)) continue;
        }
        survivors.emplace_back(scores[c], c);
    }
    std::stable_sort(survivors.begin(), survivors.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    std::size_t first = 0, last = 0;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
        if (survivors[i].first > scores[truth]) continue;
        if (survivors[i].first < scores[truth]) break;
        if (first == 0) first = i + 1;
        last = i + 1;
    }
    const double mean_pos = (static_cast<double>(first) + static_cast<double>(last)) / 2.0;
    return static_cast<std::uint32_t>(std::floor(mean_pos + 0.5));
}

MetricsReport brute_force_evaluate(const LinkPredictor& model, std::span<const Triple> test,
                                   const TripleStore& store, RankMode mode) {
    std::vector<RankedTriple> ranks;
    for (const auto& t : test) {
        ranks.push_back({t, Direction::tail,
                         brute_force_rank(model, t.head, t.relation, Direction::tail, t.tail,
                                          store, mode)});
        ranks.push_back({t, Direction::head,
                         brute_force_rank(model, t.tail, t.relation, Direction::head, t.head,
                                          store, mode)});
    }
    return aggregate_ranks(std::move(ranks), mode);
}

// Fixed-score model built from an explicit tail-score vector for entity 0.
class VectorModel final : public LinkPredictor {
public:
    explicit VectorModel(std::vector<double> scores) : scores_(std::move(scores)) {}
    ModelKind kind() const override { return ModelKind::tucker; }
    std::size_t n_entities() const override { return scores_.size(); }
    std::size_t n_relations() const override { return 1; }
    double score(EntityId, RelationId, EntityId t) const override { return scores_[t]; }
    std::vector<double> score_candidates(EntityId, RelationId, Direction) const override {
        return scores_;
    }
    double confidence(double p) const override { return sigmoid(p); }

private:
    std::vector<double> scores_;
};

TripleStore empty_store(std::size_t n_e) {
    std::vector<tkg::Entity> entities;
    for (std::size_t i = 0; i < n_e; ++i) entities.push_back({0, "e" + std::to_string(i), ""});
    return TripleStore::build(std::move(entities), {});
}

}  // namespace

TEST_CASE("a strictly best true entity ranks first") {
    VectorModel model({0.1, 5.0, -1.0, 0.3});
    const auto store = empty_store(4);
    CHECK(rank_of_true_entity(model, 0, 0, Direction::tail, 1, store, RankMode::raw) == 1);
}

TEST_CASE("five-way tie lands on the mean position 3") {
    VectorModel model({1.0, 1.0, 1.0, 1.0, 1.0});
    const auto store = empty_store(5);
    CHECK(rank_of_true_entity(model, 0, 0, Direction::tail, 2, store, RankMode::raw) == 3);
}

TEST_CASE("filtering removes exactly the known-true competitors") {
    // Entities 1, 2, 3 outrank the truth (4) and are known true tails.
    VectorModel model({0.0, 3.0, 2.5, 2.0, 1.0});
    std::vector<tkg::Entity> entities;
    for (int i = 0; i < 5; ++i) entities.push_back({0, "e" + std::to_string(i), ""});
    std::vector<RawTriple> raw{{"e0", "r", "e1"}, {"e0", "r", "e2"}, {"e0", "r", "e3"}};
    const auto store = TripleStore::build(std::move(entities), raw);

    const auto raw_rank =
        rank_of_true_entity(model, 0, 0, Direction::tail, 4, store, RankMode::raw);
    const auto filtered_rank =
        rank_of_true_entity(model, 0, 0, Direction::tail, 4, store, RankMode::filtered);
    CHECK(raw_rank == 4);
    CHECK(filtered_rank == 1);
    CHECK(raw_rank - filtered_rank == 3);
}

TEST_CASE("aggregates over ranks {1, 3, 20} match hand arithmetic") {
    std::vector<RankedTriple> ranks{{{0, 0, 0}, Direction::tail, 1},
                                    {{0, 0, 1}, Direction::tail, 3},
                                    {{0, 0, 2}, Direction::tail, 20}};
    const auto rep = aggregate_ranks(std::move(ranks), RankMode::raw);
    CHECK(rep.hits1 == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
    CHECK(rep.hits3 == doctest::Approx(200.0 / 3.0).epsilon(1e-12));
    CHECK(rep.hits10 == doctest::Approx(200.0 / 3.0).epsilon(1e-12));
    CHECK(rep.mr == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(rep.mrr == doctest::Approx((1.0 + 1.0 / 3.0 + 1.0 / 20.0) / 3.0).epsilon(1e-12));
    CHECK(tkg::format_fixed(rep.mrr, 4) == "0.4611");
}

TEST_CASE("a perfect model reports ceiling metrics") {
    Rng rng(3);
    const auto store = random_store(rng, 10, 2, 20);
    std::vector<RankedTriple> ranks;
    for (const auto& t : store.triples()) ranks.push_back({t, Direction::tail, 1});
    const auto rep = aggregate_ranks(std::move(ranks), RankMode::filtered);
    CHECK(rep.hits1 == 100.0);
    CHECK(rep.mr == 1.0);
    CHECK(rep.mrr == 1.0);
}

TEST_CASE("evaluate matches the brute-force oracle exactly") {
    Rng rng(2024);
    for (int round = 0; round < 60; ++round) {
        const std::size_t n_e = 5 + rng.uniform_index(45);
        const std::size_t n_r = 1 + rng.uniform_index(4);
        const std::size_t n_t = std::min<std::size_t>(4 + rng.uniform_index(40), n_e * n_e / 2);
        const auto store = random_store(rng, n_e, n_r, n_t);

        std::unique_ptr<LinkPredictor> model;
        switch (round % 3) {
            case 0:
                model = make_predictor(
                    init_tucker(n_e, store.n_relations(), 6, 3, rng.next_u64()));
                break;
            case 1:
                model = make_predictor(
                    init_transh(n_e, store.n_relations(), 6, rng.next_u64()));
                break;
            default:
                model = std::make_unique<TableModel>(n_e, store.n_relations(), rng.next_u64(),
                                                     true);
        }

        std::vector<Triple> test(store.triples().begin(), store.triples().end());
        test.resize(std::min<std::size_t>(test.size(), 10));

        for (const auto mode : {RankMode::raw, RankMode::filtered}) {
            const auto fast = evaluate(*model, test, store, mode);
            const auto slow = brute_force_evaluate(*model, test, store, mode);
            REQUIRE(fast.per_triple_ranks.size() == slow.per_triple_ranks.size());
            for (std::size_t i = 0; i < fast.per_triple_ranks.size(); ++i) {
                CHECK(fast.per_triple_ranks[i].rank == slow.per_triple_ranks[i].rank);
            }
            CHECK(fast.hits1 == slow.hits1);
            CHECK(fast.hits3 == slow.hits3);
            CHECK(fast.hits10 == slow.hits10);
            CHECK(fast.mr == slow.mr);
            CHECK(fast.mrr == slow.mrr);
        }
    }
}

TEST_CASE("metric invariants on random evaluations") {
    Rng rng(404);
    for (int round = 0; round < 10; ++round) {
        const auto store = random_store(rng, 20, 3, 50);
        const auto model = TableModel(20, store.n_relations(), rng.next_u64(), true);
        std::vector<Triple> test(store.triples().begin(), store.triples().end());
        const auto raw = evaluate(model, test, store, RankMode::raw);
        const auto filtered = evaluate(model, test, store, RankMode::filtered);

        for (const auto* rep : {&raw, &filtered}) {
            CHECK(rep->hits1 <= rep->hits3);
            CHECK(rep->hits3 <= rep->hits10);
            for (const auto& r : rep->per_triple_ranks) {
                CHECK(r.rank >= 1);
                CHECK(r.rank <= store.n_entities());
            }
        }
        // Filtering never worsens any rank.
        for (std::size_t i = 0; i < raw.per_triple_ranks.size(); ++i) {
            CHECK(filtered.per_triple_ranks[i].rank <= raw.per_triple_ranks[i].rank);
        }
    }
}

TEST_CASE("one poorly ranked entity swings MR but barely moves MRR") {
    const std::size_t k = 9;
    const std::uint32_t n_e = 50;
    std::vector<RankedTriple> base;
    for (std::size_t i = 0; i < k; ++i) base.push_back({{0, 0, 0}, Direction::tail, 1});
    const auto before = aggregate_ranks(std::vector<RankedTriple>(base), RankMode::raw);

    base.push_back({{0, 0, 1}, Direction::tail, n_e});
    const auto after = aggregate_ranks(std::move(base), RankMode::raw);

    const double mr_shift = after.mr - before.mr;
    const double expected = static_cast<double>(n_e - 1) / static_cast<double>(k + 1);
    CHECK(mr_shift == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::fabs(after.mrr - before.mrr) < 1.0 / static_cast<double>(k + 1));
}

TEST_CASE("evaluate validates its inputs") {
    Rng rng(5);
    const auto store = random_store(rng, 10, 2, 20);
    const auto model = make_predictor(init_tucker(10, store.n_relations(), 4, 2, 1));
    CHECK_THROWS_AS(evaluate(*model, {}, store, RankMode::raw), DomainError);
    const std::vector<Triple> bad{{99, 0, 1}};
    CHECK_THROWS_AS(evaluate(*model, bad, store, RankMode::raw), DomainError);
}

TEST_CASE("report serialization carries the mode and the table layout") {
    std::vector<RankedTriple> ranks{{{0, 0, 1}, Direction::tail, 2}};
    const auto rep = aggregate_ranks(std::move(ranks), RankMode::filtered);
    const auto table = rep.to_table();
    CHECK(table.find("Hits@1") != std::string::npos);
    CHECK(table.find("MRR") != std::string::npos);
    CHECK(table.find("filtered") != std::string::npos);
    const auto json = rep.to_json();
    CHECK(json.find("\"mode\":\"filtered\"") != std::string::npos);
    CHECK(json.find("\"rank\":2") != std::string::npos);
}
