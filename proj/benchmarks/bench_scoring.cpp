#include <benchmark/benchmark.h>

#include <threatkg/transh.hpp>
#include <threatkg/tucker.hpp>

namespace {

using namespace tkg;

void BM_TuckerAllTails(benchmark::State& state) {
    const auto n_e = static_cast<std::size_t>(state.range(0));
    const auto d_e = static_cast<std::size_t>(state.range(1));
    const auto params = init_tucker(n_e, 8, d_e, 30, 1);
    EntityId h = 0;
    for (auto _ : state) {
        auto scores = score_tucker_all_tails(params, h, 3);
        benchmark::DoNotOptimize(scores.data());
        h = (h + 1) % n_e;
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n_e));
}
BENCHMARK(BM_TuckerAllTails)
    ->Args({1000, 32})
    ->Args({1000, 64})
    ->Args({1000, 200})
    ->Args({27354, 200});

void BM_TuckerSingleScore(benchmark::State& state) {
    const auto d_e = static_cast<std::size_t>(state.range(0));
    const auto params = init_tucker(5000, 8, d_e, 30, 1);
    EntityId h = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_tucker(params, h, 2, (h * 7 + 3) % 5000));
        h = (h + 1) % 5000;
    }
}
BENCHMARK(BM_TuckerSingleScore)->Arg(32)->Arg(64)->Arg(200);

void BM_TransHCandidates(benchmark::State& state) {
    const auto n_e = static_cast<std::size_t>(state.range(0));
    const auto params = init_transh(n_e, 8, 200, 1);
    EntityId known = 0;
    for (auto _ : state) {
        auto scores = score_transh_candidates(params, known, 1, Direction::tail);
        benchmark::DoNotOptimize(scores.data());
        known = (known + 1) % n_e;
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n_e));
}
BENCHMARK(BM_TransHCandidates)->Arg(1000)->Arg(27354);

void BM_TuckerTrainStep(benchmark::State& state) {
    const auto d_e = static_cast<std::size_t>(state.range(0));
    const std::size_t n_e = 1000;
    const auto params = init_tucker(n_e, 8, d_e, 30, 1);
    OneToNBatch batch;
    Rng rng(2);
    for (int i = 0; i < 128; ++i) {
        batch.pairs.emplace_back(static_cast<EntityId>(rng.uniform_index(n_e)),
                                 static_cast<RelationId>(rng.uniform_index(16)));
        batch.truths.push_back({static_cast<EntityId>(rng.uniform_index(n_e))});
    }
    for (auto _ : state) {
        auto step = tucker_loss_and_grad(params, batch, 0.1, nullptr);
        benchmark::DoNotOptimize(step.loss);
    }
}
BENCHMARK(BM_TuckerTrainStep)->Arg(32)->Arg(64);

}  // namespace
