#include <benchmark/benchmark.h>

#include <threatkg/metrics.hpp>

namespace {

using namespace tkg;

TripleStore make_store(std::size_t n_e, std::size_t n_r, std::size_t n_t) {
    Rng rng(7);
    std::vector<Entity> entities;
    for (std::size_t i = 0; i < n_e; ++i) entities.push_back({0, "e" + std::to_string(i), ""});
    TripleSet seen;
    std::vector<RawTriple> raw;
    while (seen.size() < n_t) {
        const auto h = static_cast<EntityId>(rng.uniform_index(n_e));
        const auto r = static_cast<RelationId>(rng.uniform_index(n_r));
        const auto t = static_cast<EntityId>(rng.uniform_index(n_e));
        if (!seen.insert({h, r, t}).second) continue;
        raw.push_back({"e" + std::to_string(h), "r" + std::to_string(r),
                       "e" + std::to_string(t)});
    }
    return TripleStore::build(std::move(entities), raw);
}

void BM_FilteredEvaluation(benchmark::State& state) {
    const auto n_e = static_cast<std::size_t>(state.range(0));
    const auto store = make_store(n_e, 6, n_e * 4);
    const auto model = make_predictor(init_tucker(n_e, store.n_relations(), 64, 30, 1));
    std::vector<Triple> test(store.triples().begin(), store.triples().begin() + 50);
    for (auto _ : state) {
        auto report = evaluate(*model, test, store, RankMode::filtered);
        benchmark::DoNotOptimize(report.mrr);
    }
    state.SetItemsProcessed(state.iterations() * 100);  // two ranks per triple
}
BENCHMARK(BM_FilteredEvaluation)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_KnownTailsLookup(benchmark::State& state) {
    const auto store = make_store(5000, 12, 40000);
    EntityId e = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(store.known_tails(e, e % 12).size());
        e = (e + 1) % 5000;
    }
}
BENCHMARK(BM_KnownTailsLookup);

}  // namespace
