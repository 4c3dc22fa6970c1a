#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "threatkg/batchnorm.hpp"
#include "threatkg/linalg.hpp"
#include "threatkg/rng.hpp"
#include "threatkg/transh.hpp"  // Direction
#include "threatkg/triple_store.hpp"

namespace tkg {

struct DropoutRates {
    double input = 0.3;
    double hidden = 0.4;
    double output = 0.5;

    friend bool operator==(const DropoutRates&, const DropoutRates&) = default;
};

// Linear tensor-factorization model: a triple's logit is the three-way
// contraction of a learned core tensor with the head, relation and tail
// embeddings. Head prediction runs through synthesized reciprocal relations,
// so the relation table has 2*n_r rows (base ids 0..n_r-1, reciprocals
// n_r..2n_r-1).
struct TuckerParams {
    Matrix entity_emb;  // n_e x d_e
    Matrix rel_emb;     // 2*n_r x d_r
    Tensor3 core;       // d_e x d_r x d_e
    BatchNormState bn0; // over d_e, before the core contraction
    BatchNormState bn1; // over d_e, after it
    DropoutRates dropout;

    std::size_t n_entities() const { return entity_emb.rows(); }
    std::size_t n_base_relations() const { return rel_emb.rows() / 2; }
    std::size_t d_e() const { return entity_emb.cols(); }
    std::size_t d_r() const { return rel_emb.cols(); }

    friend bool operator==(const TuckerParams&, const TuckerParams&) = default;
};

inline RelationId reciprocal_relation(RelationId r, std::size_t n_base) {
    return r + static_cast<RelationId>(n_base);
}

// Embeddings Xavier-normal (stddev sqrt(2/(rows+cols))), core uniform in
// [-1, 1], fresh batch-norm states. Deterministic under seed.
TuckerParams init_tucker(std::size_t n_e, std::size_t n_r, std::size_t d_e, std::size_t d_r,
                         std::uint64_t seed, DropoutRates dropout = {},
                         double bn_momentum = 0.1);

// Inverted-dropout masks (entries 0 or 1/keep) for one batch.
struct DropoutMasks {
    Matrix input;   // B x d_e
    Matrix hidden;  // B x d_e
    Matrix output;  // B x n_e
};

DropoutMasks sample_dropout_masks(std::size_t batch, std::size_t d_e, std::size_t n_e,
                                  DropoutRates rates, Rng& rng);

// Logit of a single triple. Eval mode is deterministic (running batch-norm
// statistics, no dropout); train mode needs an rng for dropout and uses
// batch-of-one statistics.
double score_tucker(const TuckerParams& params, EntityId h, RelationId r, EntityId t,
                    RunMode mode = RunMode::eval, Rng* rng = nullptr);

// Logits of (h, r, *) against every entity; component k matches
// score_tucker(h, r, k) in eval mode within 1e-10.
std::vector<double> score_tucker_all_tails(const TuckerParams& params, EntityId h, RelationId r,
                                           RunMode mode = RunMode::eval, Rng* rng = nullptr);

// Logistic sigmoid, numerically stable.
double sigmoid(double x);

// Confidence of a TuckER logit.
double tucker_confidence(double plausibility);

// 1-N training batch: each (entity, relation-or-reciprocal) pair scores all
// entities against a multi-hot truth vector.
struct OneToNBatch {
    std::vector<std::pair<EntityId, RelationId>> pairs;
    std::vector<std::vector<EntityId>> truths;  // parallel to pairs
};

struct TuckerGrads {
    Matrix d_entity_emb;
    Matrix d_rel_emb;
    Tensor3 d_core;
    BatchNormGrads bn0;
    BatchNormGrads bn1;
};

struct TuckerStepResult {
    double loss = 0.0;
    TuckerGrads grads;
    // Train-mode batch statistics; feed to batchnorm_update_running.
    BatchNormCache bn0_cache;
    BatchNormCache bn1_cache;
};

// Binary cross-entropy over all entities per pair (mean reduction over
// batch x n_e cells), label smoothing y' = (1-ls)*y + ls/n_e, analytic
// gradients for every parameter tensor including batch-norm scale/shift.
// Batch norm runs in train mode; masks == nullptr disables dropout.
TuckerStepResult tucker_loss_and_grad(const TuckerParams& params, const OneToNBatch& batch,
                                      double label_smoothing, const DropoutMasks* masks);

}  // namespace tkg
