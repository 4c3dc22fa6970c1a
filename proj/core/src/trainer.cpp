#include "threatkg/trainer.hpp"

#include <chrono>
#include <ostream>
#include <unordered_map>

#include "threatkg/adam.hpp"
#include "threatkg/text.hpp"

namespace tkg {

void TrainConfig::validate() const {
    if (d_e == 0 || (model == ModelKind::tucker && d_r == 0)) {
        throw DomainError("embedding dimensions must be positive");
    }
    if (learning_rate <= 0.0) throw DomainError("learning rate must be positive");
    if (batch_size == 0) throw DomainError("batch size must be positive");
    if (iterations == 0) throw DomainError("iterations must be positive");
    if (label_smoothing < 0.0 || label_smoothing >= 1.0) {
        throw DomainError("label smoothing must be in [0, 1)");
    }
    if (margin <= 0.0) throw DomainError("margin must be positive");
    if (negatives_per_positive == 0) throw DomainError("negatives per positive must be >= 1");
    if (bn_momentum <= 0.0 || bn_momentum > 1.0) throw DomainError("bad batch-norm momentum");
    for (const double r : {dropout.input, dropout.hidden, dropout.output}) {
        if (r < 0.0 || r >= 1.0) throw DomainError("dropout rates must be in [0, 1)");
    }
}

std::string TrainHistory::to_jsonl() const {
    std::string out;
    for (const auto& r : records) {
        out += "{\"iteration\":" + std::to_string(r.iteration) +
               ",\"loss\":" + format_exact(r.mean_loss);
        if (r.val_mrr) out += ",\"val_mrr\":" + format_exact(*r.val_mrr);
        if (r.val_hits10) out += ",\"val_hits10\":" + format_exact(*r.val_hits10);
        out += ",\"wall_seconds\":" + format_exact(r.wall_seconds) + "}\n";
    }
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void append_record(TrainHistory& history, HistoryRecord rec, std::ostream* log) {
    history.records.push_back(rec);
    if (log) {
        TrainHistory one;
        one.records.push_back(rec);
        *log << one.to_jsonl() << std::flush;
    }
}

std::optional<MetricsReport> maybe_validate(const TrainConfig& config, std::size_t epoch,
                                            std::span<const Triple> valid,
                                            const TripleStore& store,
                                            const ModelParams& params) {
    if (config.validation_every == 0 || valid.empty()) return std::nullopt;
    if (epoch % config.validation_every != 0) return std::nullopt;
    const auto predictor = make_predictor(params);
    return evaluate(*predictor, valid, store, config.validation_mode);
}

TrainResult train_transh(const TrainConfig& config, std::span<const Triple> train_triples,
                         std::span<const Triple> valid_triples, const TripleStore& store,
                         std::ostream* log) {
    const auto start = Clock::now();
    TransHParams params =
        init_transh(store.n_entities(), store.n_relations(), config.d_e, config.seed);

    Rng root(config.seed);
    Rng order_rng = root.fork(1);
    Rng corrupt_rng = root.fork(2);

    TripleSet train_set(train_triples.begin(), train_triples.end());

    Adam adam(config.learning_rate);
    const std::size_t slot_e = adam.add_parameter(params.entity_emb.size());
    const std::size_t slot_d = adam.add_parameter(params.rel_translation.size());
    const std::size_t slot_w = adam.add_parameter(params.rel_normal.size());

    TrainResult result;
    std::vector<std::size_t> order(train_triples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<ContrastPair> batch;
    for (std::size_t epoch = 1; epoch <= config.iterations; ++epoch) {
        order_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t pair_count = 0;

        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, order.size());
            batch.clear();
            for (std::size_t k = begin; k < end; ++k) {
                const Triple& pos = train_triples[order[k]];
                for (std::size_t n = 0; n < config.negatives_per_positive; ++n) {
                    batch.push_back({pos, sample_negative(pos, store.n_entities(), corrupt_rng,
                                                          train_set,
                                                          &result.negative_stats)});
                }
            }
            TransHStepResult step;
            try {
                step = transh_loss_and_grad(params, batch, config.margin);
            } catch (const NumericError& e) {
                throw NumericError(e.tensor(), "training aborted at iteration " +
                                                   std::to_string(epoch) + ", batch " +
                                                   std::to_string(begin / config.batch_size) +
                                                   ": " + e.what());
            }
            loss_sum += step.loss * static_cast<double>(batch.size());
            pair_count += batch.size();

            adam.begin_step();
            adam.update(slot_e, params.entity_emb.data(), step.grads.d_entity_emb.data());
            adam.update(slot_d, params.rel_translation.data(),
                        step.grads.d_rel_translation.data());
            adam.update(slot_w, params.rel_normal.data(), step.grads.d_rel_normal.data());
            renormalize_normals(params);
        }

        HistoryRecord rec;
        rec.iteration = epoch;
        rec.mean_loss = pair_count ? loss_sum / static_cast<double>(pair_count) : 0.0;
        ModelParams snapshot = params;
        if (const auto val = maybe_validate(config, epoch, valid_triples, store, snapshot)) {
            rec.val_mrr = val->mrr;
            rec.val_hits10 = val->hits10;
        }
        rec.wall_seconds = seconds_since(start);
        append_record(result.history, rec, log);
    }

    result.params = std::move(params);
    return result;
}

TrainResult train_tucker(const TrainConfig& config, std::span<const Triple> train_triples,
                         std::span<const Triple> valid_triples, const TripleStore& store,
                         std::ostream* log) {
    const auto start = Clock::now();
    TuckerParams params = init_tucker(store.n_entities(), store.n_relations(), config.d_e,
                                      config.d_r, config.seed, config.dropout,
                                      config.bn_momentum);

    Rng root(config.seed);
    Rng order_rng = root.fork(1);
    Rng dropout_rng = root.fork(3);

    // 1-N pairs: (h, r) -> tails and, via the reciprocal relation, (t, r') -> heads.
    const std::size_t n_base = store.n_relations();
    std::vector<std::pair<EntityId, RelationId>> pairs;
    std::vector<std::vector<EntityId>> truths;
    std::unordered_map<std::uint64_t, std::size_t> pair_index;
    const auto add = [&](EntityId e, RelationId r, EntityId truth) {
        const std::uint64_t key = (static_cast<std::uint64_t>(e) << 32) | r;
        const auto it = pair_index.find(key);
        if (it == pair_index.end()) {
            pair_index.emplace(key, pairs.size());
            pairs.emplace_back(e, r);
            truths.push_back({truth});
        } else {
            truths[it->second].push_back(truth);
        }
    };
    for (const auto& t : train_triples) {
        add(t.head, t.relation, t.tail);
        add(t.tail, reciprocal_relation(t.relation, n_base), t.head);
    }

    Adam adam(config.learning_rate);
    const std::size_t slot_e = adam.add_parameter(params.entity_emb.size());
    const std::size_t slot_r = adam.add_parameter(params.rel_emb.size());
    const std::size_t slot_w = adam.add_parameter(params.core.size());
    const std::size_t slot_g0 = adam.add_parameter(params.bn0.gamma.size());
    const std::size_t slot_b0 = adam.add_parameter(params.bn0.beta.size());
    const std::size_t slot_g1 = adam.add_parameter(params.bn1.gamma.size());
    const std::size_t slot_b1 = adam.add_parameter(params.bn1.beta.size());

    const bool any_dropout = config.dropout.input > 0.0 || config.dropout.hidden > 0.0 ||
                             config.dropout.output > 0.0;

    TrainResult result;
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    OneToNBatch batch;
    for (std::size_t epoch = 1; epoch <= config.iterations; ++epoch) {
        order_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t seen = 0;

        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, order.size());
            batch.pairs.clear();
            batch.truths.clear();
            for (std::size_t k = begin; k < end; ++k) {
                batch.pairs.push_back(pairs[order[k]]);
                batch.truths.push_back(truths[order[k]]);
            }
            std::optional<DropoutMasks> masks;
            if (any_dropout) {
                masks = sample_dropout_masks(batch.pairs.size(), config.d_e,
                                             store.n_entities(), config.dropout, dropout_rng);
            }
            TuckerStepResult step;
            try {
                step = tucker_loss_and_grad(params, batch, config.label_smoothing,
                                            masks ? &*masks : nullptr);
            } catch (const NumericError& e) {
                throw NumericError(e.tensor(), "training aborted at iteration " +
                                                   std::to_string(epoch) + ", batch " +
                                                   std::to_string(begin / config.batch_size) +
                                                   ": " + e.what());
            }
            loss_sum += step.loss * static_cast<double>(batch.pairs.size());
            seen += batch.pairs.size();

            adam.begin_step();
            adam.update(slot_e, params.entity_emb.data(), step.grads.d_entity_emb.data());
            adam.update(slot_r, params.rel_emb.data(), step.grads.d_rel_emb.data());
            adam.update(slot_w, params.core.data(), step.grads.d_core.data());
            adam.update(slot_g0, params.bn0.gamma, step.grads.bn0.dgamma);
            adam.update(slot_b0, params.bn0.beta, step.grads.bn0.dbeta);
            adam.update(slot_g1, params.bn1.gamma, step.grads.bn1.dgamma);
            adam.update(slot_b1, params.bn1.beta, step.grads.bn1.dbeta);
            batchnorm_update_running(params.bn0, step.bn0_cache, batch.pairs.size());
            batchnorm_update_running(params.bn1, step.bn1_cache, batch.pairs.size());
        }

        HistoryRecord rec;
        rec.iteration = epoch;
        rec.mean_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
        ModelParams snapshot = params;
        if (const auto val = maybe_validate(config, epoch, valid_triples, store, snapshot)) {
            rec.val_mrr = val->mrr;
            rec.val_hits10 = val->hits10;
        }
        rec.wall_seconds = seconds_since(start);
        append_record(result.history, rec, log);
    }

    result.params = std::move(params);
    return result;
}

}  // namespace

TrainResult train(const TrainConfig& config, std::span<const Triple> train_triples,
                  std::span<const Triple> valid_triples, const TripleStore& store,
                  std::ostream* log) {
    config.validate();
    if (train_triples.empty()) throw DomainError("empty training set");
    for (const auto& t : train_triples) {
        if (t.head >= store.n_entities() || t.tail >= store.n_entities() ||
            t.relation >= store.n_relations()) {
            throw DomainError("training triple references unknown vocabulary");
        }
    }
    if (config.model == ModelKind::transh) {
        return train_transh(config, train_triples, valid_triples, store, log);
    }
    return train_tucker(config, train_triples, valid_triples, store, log);
}

}  // namespace tkg
