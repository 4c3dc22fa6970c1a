#include <benchmark/benchmark.h>

#include <threatkg/ingest.hpp>

namespace {

using namespace tkg;

std::string make_corpus(std::size_t lines) {
    std::string out;
    out.reserve(lines * 24);
    for (std::size_t i = 0; i < lines; ++i) {
        out += "host" + std::to_string(i % 9000) + "\tr" + std::to_string(i % 11) + "\tioc" +
               std::to_string((i * 13 + 1) % 9000) + "\n";
    }
    return out;
}

void BM_ParseTripleFile(benchmark::State& state) {
    const auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto raw = parse_triple_file(corpus);
        benchmark::DoNotOptimize(raw.data());
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size()));
}
BENCHMARK(BM_ParseTripleFile)->Arg(1000)->Arg(40000)->Unit(benchmark::kMillisecond);

void BM_StoreBuild(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto raw = parse_triple_file(make_corpus(n));
    std::vector<Entity> entities;
    for (std::size_t i = 0; i < 9000; ++i) {
        entities.push_back({0, "host" + std::to_string(i), ""});
        entities.push_back({0, "ioc" + std::to_string(i), ""});
    }
    for (auto _ : state) {
        auto store = TripleStore::build(entities, raw);
        benchmark::DoNotOptimize(store.n_triples());
    }
}
BENCHMARK(BM_StoreBuild)->Arg(40000)->Unit(benchmark::kMillisecond);

}  // namespace
