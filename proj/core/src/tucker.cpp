#include "threatkg/tucker.hpp"

#include <cmath>
#include <utility>

#include "threatkg/error.hpp"

namespace tkg {

namespace {

void check_ids(const TuckerParams& p, EntityId e, RelationId r) {
    if (e >= p.n_entities()) throw DomainError("entity id out of range for model");
    if (r >= p.rel_emb.rows()) {
        throw DomainError("relation id out of range for model (reciprocals included)");
    }
}

double softplus(double x) {
    return (x > 0.0 ? x : 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

// W x2 r: wr[a][c] = sum_j r[j] * W[a][j][c]
void contract_relation(const Tensor3& core, const double* rel, Matrix& wr) {
    const std::size_t d_e = core.dim0();
    const std::size_t d_r = core.dim1();
    wr.fill(0.0);
    for (std::size_t a = 0; a < d_e; ++a) {
        double* out = wr.row(a);
        for (std::size_t j = 0; j < d_r; ++j) {
            const double rj = rel[j];
            if (rj == 0.0) continue;
            const double* w = core.row(a, j);
            for (std::size_t c = 0; c < d_e; ++c) out[c] += rj * w[c];
        }
    }
}

struct ForwardCache {
    Matrix x0;                // entity rows after input dropout (B x d_e)
    Matrix x1;                // after bn0
    std::vector<Matrix> wr;   // per-example core x2 relation (d_e x d_e)
    Matrix y;                 // after contraction with x1
    Matrix y1;                // after hidden dropout
    Matrix z;                 // after bn1
    Matrix logits;            // z . E^T (B x n_e)
    BatchNormCache bn0c, bn1c;
};

void apply_mask(Matrix& m, const Matrix& mask) {
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] *= mask.data()[i];
}

// Shared forward pass. Order: input dropout on the head row, bn0, contraction
// with the relation and core, hidden dropout, bn1, contraction with all
// entity embeddings, output dropout applied to the logits by the caller.
void tucker_forward(const TuckerParams& p,
                    std::span<const std::pair<EntityId, RelationId>> pairs, RunMode mode,
                    const DropoutMasks* masks, ForwardCache& c) {
    const std::size_t batch = pairs.size();
    const std::size_t d_e = p.d_e();
    const std::size_t n_e = p.n_entities();

    c.x0 = Matrix(batch, d_e);
    for (std::size_t i = 0; i < batch; ++i) {
        check_ids(p, pairs[i].first, pairs[i].second);
        const double* row = p.entity_emb.row(pairs[i].first);
        double* out = c.x0.row(i);
        for (std::size_t a = 0; a < d_e; ++a) out[a] = row[a];
    }
    if (masks) apply_mask(c.x0, masks->input);

    c.x1 = batchnorm_apply(p.bn0, c.x0, mode, mode == RunMode::train ? &c.bn0c : nullptr);

    c.wr.resize(batch);
    c.y = Matrix(batch, d_e);
    for (std::size_t i = 0; i < batch; ++i) {
        if (c.wr[i].rows() != d_e) c.wr[i] = Matrix(d_e, d_e);
        contract_relation(p.core, p.rel_emb.row(pairs[i].second), c.wr[i]);
        const double* x = c.x1.row(i);
        double* out = c.y.row(i);
        for (std::size_t a = 0; a < d_e; ++a) {
            const double xa = x[a];
            if (xa == 0.0) continue;
            const double* w = c.wr[i].row(a);
            for (std::size_t cc = 0; cc < d_e; ++cc) out[cc] += xa * w[cc];
        }
    }

    c.y1 = c.y;
    if (masks) apply_mask(c.y1, masks->hidden);

    c.z = batchnorm_apply(p.bn1, c.y1, mode, mode == RunMode::train ? &c.bn1c : nullptr);

    c.logits = Matrix(batch, n_e);
    for (std::size_t i = 0; i < batch; ++i) {
        const double* z = c.z.row(i);
        double* out = c.logits.row(i);
        for (EntityId e = 0; e < n_e; ++e) {
            out[e] = dot({z, d_e}, {p.entity_emb.row(e), d_e});
        }
    }
}

}  // namespace

TuckerParams init_tucker(std::size_t n_e, std::size_t n_r, std::size_t d_e, std::size_t d_r,
                         std::uint64_t seed, DropoutRates dropout, double bn_momentum) {
    if (n_e == 0 || n_r == 0) throw DomainError("model needs at least one entity and relation");
    if (d_e == 0 || d_r == 0) throw DomainError("embedding dimensions must be >= 1");

    TuckerParams p;
    p.entity_emb = Matrix(n_e, d_e);
    p.rel_emb = Matrix(2 * n_r, d_r);
    p.core = Tensor3(d_e, d_r, d_e);
    p.bn0 = BatchNormState::make(d_e, bn_momentum);
    p.bn1 = BatchNormState::make(d_e, bn_momentum);
    p.dropout = dropout;

    Rng rng(seed);
    const double ent_std = std::sqrt(2.0 / static_cast<double>(n_e + d_e));
    for (double& x : p.entity_emb.data()) x = rng.normal(0.0, ent_std);
    const double rel_std = std::sqrt(2.0 / static_cast<double>(2 * n_r + d_r));
    for (double& x : p.rel_emb.data()) x = rng.normal(0.0, rel_std);
    for (double& x : p.core.data()) x = rng.uniform_real(-1.0, 1.0);
    return p;
}

DropoutMasks sample_dropout_masks(std::size_t batch, std::size_t d_e, std::size_t n_e,
                                  DropoutRates rates, Rng& rng) {
    for (const double r : {rates.input, rates.hidden, rates.output}) {
        if (r < 0.0 || r >= 1.0) throw DomainError("dropout rates must be in [0, 1)");
    }
    const auto fill = [&rng](Matrix& m, double rate) {
        if (rate == 0.0) {
            m.fill(1.0);
            return;
        }
        const double inv_keep = 1.0 / (1.0 - rate);
        for (double& x : m.data()) x = rng.uniform_real() < rate ? 0.0 : inv_keep;
    };
    DropoutMasks masks{Matrix(batch, d_e), Matrix(batch, d_e), Matrix(batch, n_e)};
    fill(masks.input, rates.input);
    fill(masks.hidden, rates.hidden);
    fill(masks.output, rates.output);
    return masks;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double tucker_confidence(double plausibility) {
    return sigmoid(plausibility);
}

double score_tucker(const TuckerParams& params, EntityId h, RelationId r, EntityId t,
                    RunMode mode, Rng* rng) {
    check_ids(params, h, r);
    check_ids(params, t, r);
    if (mode == RunMode::train && rng == nullptr) {
        throw DomainError("train-mode scoring requires an rng for dropout");
    }

    const std::size_t d_e = params.d_e();
    std::optional<DropoutMasks> masks;
    if (mode == RunMode::train) {
        masks = sample_dropout_masks(1, d_e, params.n_entities(), params.dropout, *rng);
    }

    // Scalar path: identical steps but the final contraction is a single dot.
    Matrix x0(1, d_e);
    for (std::size_t a = 0; a < d_e; ++a) x0.at(0, a) = params.entity_emb.at(h, a);
    if (masks) apply_mask(x0, masks->input);
    const Matrix x1 = batchnorm_apply(params.bn0, x0, mode);

    Matrix wr(d_e, d_e);
    contract_relation(params.core, params.rel_emb.row(r), wr);
    Matrix y(1, d_e);
    for (std::size_t a = 0; a < d_e; ++a) {
        const double xa = x1.at(0, a);
        if (xa == 0.0) continue;
        const double* w = wr.row(a);
        for (std::size_t c = 0; c < d_e; ++c) y.at(0, c) += xa * w[c];
    }
    if (masks) apply_mask(y, masks->hidden);
    const Matrix z = batchnorm_apply(params.bn1, y, mode);

    double logit = dot(z.row_span(0), params.entity_emb.row_span(t));
    if (masks) logit *= masks->output.at(0, t);
    return logit;
}

std::vector<double> score_tucker_all_tails(const TuckerParams& params, EntityId h, RelationId r,
                                           RunMode mode, Rng* rng) {
    check_ids(params, h, r);
    if (mode == RunMode::train && rng == nullptr) {
        throw DomainError("train-mode scoring requires an rng for dropout");
    }
    std::optional<DropoutMasks> masks;
    if (mode == RunMode::train) {
        masks = sample_dropout_masks(1, params.d_e(), params.n_entities(), params.dropout, *rng);
    }
    ForwardCache cache;
    const std::pair<EntityId, RelationId> pair{h, r};
    tucker_forward(params, {&pair, 1}, mode, masks ? &*masks : nullptr, cache);
    std::vector<double> out(cache.logits.row(0), cache.logits.row(0) + params.n_entities());
    if (masks) {
        for (std::size_t e = 0; e < out.size(); ++e) out[e] *= masks->output.at(0, e);
    }
    return out;
}

TuckerStepResult tucker_loss_and_grad(const TuckerParams& params, const OneToNBatch& batch,
                                      double label_smoothing, const DropoutMasks* masks) {
    const std::size_t b = batch.pairs.size();
    if (b == 0) throw DomainError("empty TuckER batch");
    if (batch.truths.size() != b) throw DomainError("batch pairs/truths size mismatch");
    if (label_smoothing < 0.0 || label_smoothing >= 1.0) {
        throw DomainError("label smoothing must be in [0, 1)");
    }
    const std::size_t d_e = params.d_e();
    const std::size_t d_r = params.d_r();
    const std::size_t n_e = params.n_entities();
    if (masks &&
        (masks->input.rows() != b || masks->input.cols() != d_e || masks->output.cols() != n_e)) {
        throw DomainError("dropout mask shape mismatch");
    }

    ForwardCache c;
    tucker_forward(params, batch.pairs, RunMode::train, masks, c);

    TuckerStepResult res;
    res.grads.d_entity_emb = Matrix(n_e, d_e);
    res.grads.d_rel_emb = Matrix(params.rel_emb.rows(), d_r);
    res.grads.d_core = Tensor3(d_e, d_r, d_e);

    // BCE over every (pair, entity) cell, mean reduction. Smoothed target
    // y' = (1-ls)*y + ls/n_e; gradient wrt the (post-dropout) logit is
    // (sigmoid - y') / (B * n_e).
    const double smooth_on = (1.0 - label_smoothing) + label_smoothing / static_cast<double>(n_e);
    const double smooth_off = label_smoothing / static_cast<double>(n_e);
    const double inv_cells = 1.0 / static_cast<double>(b * n_e);

    double loss = 0.0;
    Matrix dlogits(b, n_e);  // gradient wrt pre-dropout logits
    std::vector<char> is_true(n_e, 0);
    for (std::size_t i = 0; i < b; ++i) {
        for (const EntityId e : batch.truths[i]) {
            if (e >= n_e) throw DomainError("truth entity id out of range");
            is_true[e] = 1;
        }
        const double* lg = c.logits.row(i);
        double* dl = dlogits.row(i);
        for (std::size_t e = 0; e < n_e; ++e) {
            double z = lg[e];
            double mask = 1.0;
            if (masks) {
                mask = masks->output.at(i, e);
                z *= mask;
            }
            const double target = is_true[e] ? smooth_on : smooth_off;
            loss += target * softplus(-z) + (1.0 - target) * softplus(z);
            dl[e] = (sigmoid(z) - target) * inv_cells * mask;
        }
        for (const EntityId e : batch.truths[i]) is_true[e] = 0;
    }
    loss *= inv_cells;
    res.loss = loss;

    if (!std::isfinite(loss)) {
        const std::pair<const char*, const std::vector<double>*> tensors[] = {
            {"entity_emb", &params.entity_emb.data()},
            {"rel_emb", &params.rel_emb.data()},
            {"core", &params.core.data()},
            {"bn0_gamma", &params.bn0.gamma},
            {"bn1_gamma", &params.bn1.gamma},
        };
        for (const auto& [name, vec] : tensors) {
            if (!all_finite(*vec)) {
                throw NumericError(name, "non-finite value in TuckER forward pass");
            }
        }
        throw NumericError("logits", "non-finite TuckER loss with finite parameters");
    }

    // logits = z . E^T : both z and the entity table receive gradient.
    Matrix dz(b, d_e);
    for (std::size_t i = 0; i < b; ++i) {
        const double* dl = dlogits.row(i);
        const double* zi = c.z.row(i);
        double* dzi = dz.row(i);
        for (EntityId e = 0; e < n_e; ++e) {
            const double g = dl[e];
            if (g == 0.0) continue;
            const double* ev = params.entity_emb.row(e);
            double* de = res.grads.d_entity_emb.row(e);
            for (std::size_t a = 0; a < d_e; ++a) {
                dzi[a] += g * ev[a];
                de[a] += g * zi[a];
            }
        }
    }

    Matrix dy1 = batchnorm_backward(params.bn1, c.bn1c, dz, res.grads.bn1);
    if (masks) apply_mask(dy1, masks->hidden);

    // Back through the core contraction, example by example.
    Matrix dx1(b, d_e);
    for (std::size_t i = 0; i < b; ++i) {
        const double* dy = dy1.row(i);
        const double* x = c.x1.row(i);
        const double* rel = params.rel_emb.row(batch.pairs[i].second);
        double* drel = res.grads.d_rel_emb.row(batch.pairs[i].second);
        double* dx = dx1.row(i);

        for (std::size_t a = 0; a < d_e; ++a) {
            const double* w = c.wr[i].row(a);
            dx[a] = dot({dy, d_e}, {w, d_e});
        }
        for (std::size_t a = 0; a < d_e; ++a) {
            const double xa = x[a];
            if (xa == 0.0) continue;
            for (std::size_t j = 0; j < d_r; ++j) {
                const double* w = params.core.row(a, j);
                double* dw = res.grads.d_core.row(a, j);
                const double coef = xa * rel[j];
                double s = 0.0;
                for (std::size_t cc = 0; cc < d_e; ++cc) {
                    s += w[cc] * dy[cc];
                    dw[cc] += coef * dy[cc];
                }
                drel[j] += xa * s;
            }
        }
    }

    Matrix dx0 = batchnorm_backward(params.bn0, c.bn0c, dx1, res.grads.bn0);
    if (masks) apply_mask(dx0, masks->input);
    for (std::size_t i = 0; i < b; ++i) {
        double* de = res.grads.d_entity_emb.row(batch.pairs[i].first);
        const double* d0 = dx0.row(i);
        for (std::size_t a = 0; a < d_e; ++a) de[a] += d0[a];
    }

    res.bn0_cache = std::move(c.bn0c);
    res.bn1_cache = std::move(c.bn1c);
    return res;
}

}  // namespace tkg
