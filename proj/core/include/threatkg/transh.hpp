#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "threatkg/linalg.hpp"
#include "threatkg/triple_store.hpp"

namespace tkg {

// Which slot of the triple is being predicted.
enum class Direction { head, tail };

// Translational model on relation-specific hyperplanes: entities are
// projected onto the hyperplane with unit normal w_r, then translated.
// Relation vectors share the entity dimension; the hyperplane geometry
// requires matching dimensions.
struct TransHParams {
    Matrix entity_emb;       // n_e x d
    Matrix rel_translation;  // n_r x d
    Matrix rel_normal;       // n_r x d, rows unit-norm within 1e-6

    std::size_t n_entities() const { return entity_emb.rows(); }
    std::size_t n_relations() const { return rel_translation.rows(); }
    std::size_t dim() const { return entity_emb.cols(); }

    friend bool operator==(const TransHParams&, const TransHParams&) = default;
};

// Entity and translation rows uniform in [-6/sqrt(d), 6/sqrt(d)]; normals
// drawn the same way then normalized. Deterministic under seed.
TransHParams init_transh(std::size_t n_e, std::size_t n_r, std::size_t dim, std::uint64_t seed);

// v_perp = v - (w.v) w. Requires ||w|| = 1 within 1e-6.
std::vector<double> project_hyperplane(std::span<const double> v, std::span<const double> w);

// Plausibility = -|| h_perp + d_r - t_perp ||^2, always <= 0.
double score_transh(const TransHParams& params, EntityId h, RelationId r, EntityId t);

// Scores of every entity substituted into the missing slot.
std::vector<double> score_transh_candidates(const TransHParams& params, EntityId known,
                                            RelationId r, Direction missing);

// exp(plausibility) = exp(-distance); 1 at distance 0, monotone.
double transh_confidence(double plausibility);

struct ContrastPair {
    Triple pos;
    Triple neg;
};

struct TransHGrads {
    Matrix d_entity_emb;
    Matrix d_rel_translation;
    Matrix d_rel_normal;
};

struct TransHStepResult {
    double loss = 0.0;
    TransHGrads grads;
};

// Margin ranking loss mean_i max(0, margin + d(pos_i) - d(neg_i)) over the
// batch, with d the squared projected-translation distance. Analytic
// gradients for all three parameter tables.
TransHStepResult transh_loss_and_grad(const TransHParams& params,
                                      std::span<const ContrastPair> batch, double margin);

// Rescales every hyperplane normal to unit length (post-optimizer-step).
void renormalize_normals(TransHParams& params);

}  // namespace tkg
