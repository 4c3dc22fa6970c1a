#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "threatkg/metrics.hpp"
#include "threatkg/model.hpp"
#include "threatkg/negative.hpp"
#include "threatkg/triple_store.hpp"

namespace tkg {

// Training hyperparameters. Numeric defaults follow the reference regime for
// this model family: d_e 200, d_r 30, learning rate 5e-4, batch 128,
// 500 iterations (full passes over the training set).
struct TrainConfig {
    ModelKind model = ModelKind::tucker;
    std::size_t d_e = 200;
    std::size_t d_r = 30;  // TuckER relation dimension; TransH ignores it
    double learning_rate = 0.0005;
    std::size_t batch_size = 128;
    std::size_t iterations = 500;
    double label_smoothing = 0.0;
    double margin = 1.0;                    // TransH hinge margin
    std::size_t negatives_per_positive = 1; // TransH
    DropoutRates dropout{};
    double bn_momentum = 0.1;
    std::uint64_t seed = 0;
    std::size_t validation_every = 0;  // epochs between validation runs; 0 = never
    RankMode validation_mode = RankMode::filtered;
    bool deterministic = true;

    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct HistoryRecord {
    std::size_t iteration = 0;  // 1-based epoch
    double mean_loss = 0.0;
    std::optional<double> val_mrr;
    std::optional<double> val_hits10;
    double wall_seconds = 0.0;
};

struct TrainHistory {
    std::vector<HistoryRecord> records;

    std::string to_jsonl() const;
};

struct TrainResult {
    ModelParams params;
    TrainHistory history;
    NegativeSampleStats negative_stats;  // TransH only
};

// Runs `iterations` full passes of mini-batches with Adam (beta1 0.9,
// beta2 0.999, eps 1e-8). TransH: uniform corruption negatives and margin
// ranking loss, hyperplane normals re-normalized after every step. TuckER:
// 1-N binary cross-entropy per (entity, relation) pair with reciprocal pairs
// included. Deterministic under config.seed. When `log` is given, one JSON
// line per history record is streamed to it.
TrainResult train(const TrainConfig& config, std::span<const Triple> train_triples,
                  std::span<const Triple> valid_triples, const TripleStore& store,
                  std::ostream* log = nullptr);

}  // namespace tkg
