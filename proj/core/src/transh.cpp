#include "threatkg/transh.hpp"

#include <cmath>

#include "threatkg/error.hpp"
#include "threatkg/rng.hpp"

namespace tkg {

namespace {

void check_ids(const TransHParams& p, EntityId h, RelationId r, EntityId t) {
    if (h >= p.n_entities() || t >= p.n_entities()) {
        throw DomainError("entity id out of range for model");
    }
    if (r >= p.n_relations()) throw DomainError("relation id out of range for model");
}

// d(h,r,t) and, optionally, the residual u = h_perp + dr - t_perp.
double distance_sq(const TransHParams& p, EntityId h, RelationId r, EntityId t,
                   std::vector<double>* residual = nullptr) {
    const std::size_t d = p.dim();
    const double* hv = p.entity_emb.row(h);
    const double* tv = p.entity_emb.row(t);
    const double* w = p.rel_normal.row(r);
    const double* dr = p.rel_translation.row(r);

    double wh = 0.0, wt = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        wh += w[i] * hv[i];
        wt += w[i] * tv[i];
    }
    double dist = 0.0;
    if (residual) residual->resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double u = (hv[i] - wh * w[i]) + dr[i] - (tv[i] - wt * w[i]);
        if (residual) (*residual)[i] = u;
        dist += u * u;
    }
    return dist;
}

}  // namespace

TransHParams init_transh(std::size_t n_e, std::size_t n_r, std::size_t dim, std::uint64_t seed) {
    if (n_e == 0 || n_r == 0) throw DomainError("model needs at least one entity and relation");
    if (dim == 0) throw DomainError("embedding dimension must be >= 1");

    TransHParams p;
    p.entity_emb = Matrix(n_e, dim);
    p.rel_translation = Matrix(n_r, dim);
    p.rel_normal = Matrix(n_r, dim);

    Rng rng(seed);
    const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
    for (double& x : p.entity_emb.data()) x = rng.uniform_real(-bound, bound);
    for (double& x : p.rel_translation.data()) x = rng.uniform_real(-bound, bound);
    for (double& x : p.rel_normal.data()) x = rng.uniform_real(-bound, bound);
    renormalize_normals(p);
    return p;
}

void renormalize_normals(TransHParams& params) {
    for (std::size_t r = 0; r < params.rel_normal.rows(); ++r) {
        auto row = params.rel_normal.row_span(r);
        double n = norm2(row);
        if (n == 0.0) {
            // Degenerate row; reset to a unit basis vector.
            row[0] = 1.0;
            n = 1.0;
        }
        for (double& x : row) x /= n;
    }
}

std::vector<double> project_hyperplane(std::span<const double> v, std::span<const double> w) {
    if (v.size() != w.size()) throw DomainError("projection dimension mismatch");
    const double wn = norm2(w);
    if (std::fabs(wn - 1.0) > 1e-6) {
        throw DomainError("hyperplane normal is not unit length (|w| = " + std::to_string(wn) +
                          ")");
    }
    const double wv = dot(w, v);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - wv * w[i];
    return out;
}

double score_transh(const TransHParams& params, EntityId h, RelationId r, EntityId t) {
    check_ids(params, h, r, t);
    return -distance_sq(params, h, r, t);
}

std::vector<double> score_transh_candidates(const TransHParams& params, EntityId known,
                                            RelationId r, Direction missing) {
    check_ids(params, known, r, known);
    const std::size_t n_e = params.n_entities();
    const std::size_t d = params.dim();
    const double* w = params.rel_normal.row(r);
    const double* dr = params.rel_translation.row(r);
    const double* kv = params.entity_emb.row(known);

    const double wk = dot({w, d}, {kv, d});
    // Fixed part of the residual: known entity projected, plus/minus the
    // translation depending on which slot is missing.
    std::vector<double> fixed(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double k_perp = kv[i] - wk * w[i];
        fixed[i] = missing == Direction::tail ? k_perp + dr[i] : k_perp - dr[i];
    }

    std::vector<double> scores(n_e);
    for (EntityId c = 0; c < n_e; ++c) {
        const double* cv = params.entity_emb.row(c);
        double wc = 0.0;
        for (std::size_t i = 0; i < d; ++i) wc += w[i] * cv[i];
        double dist = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double c_perp = cv[i] - wc * w[i];
            const double u = missing == Direction::tail ? fixed[i] - c_perp : c_perp - fixed[i];
            dist += u * u;
        }
        scores[c] = -dist;
    }
    return scores;
}

double transh_confidence(double plausibility) {
    return std::exp(plausibility);
}

TransHStepResult transh_loss_and_grad(const TransHParams& params,
                                      std::span<const ContrastPair> batch, double margin) {
    if (batch.empty()) throw DomainError("empty TransH batch");
    const std::size_t d = params.dim();

    TransHStepResult res;
    res.grads.d_entity_emb = Matrix(params.n_entities(), d);
    res.grads.d_rel_translation = Matrix(params.n_relations(), d);
    res.grads.d_rel_normal = Matrix(params.n_relations(), d);

    const double inv_b = 1.0 / static_cast<double>(batch.size());
    std::vector<double> u;

    // For one triple with residual u: dd/dh = 2(u - (w.u)w), dd/dt = -dd/dh,
    // dd/ddr = 2u, dd/dw = 2[(u.w)(t - h) + ((w.t) - (w.h)) u].
    const auto accumulate = [&](const Triple& t, double sign) {
        const double dist = distance_sq(params, t.head, t.relation, t.tail, &u);
        (void)dist;
        const double* w = params.rel_normal.row(t.relation);
        const double* hv = params.entity_emb.row(t.head);
        const double* tv = params.entity_emb.row(t.tail);

        double wu = 0.0, wh = 0.0, wt = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            wu += w[i] * u[i];
            wh += w[i] * hv[i];
            wt += w[i] * tv[i];
        }
        double* gh = res.grads.d_entity_emb.row(t.head);
        double* gt = res.grads.d_entity_emb.row(t.tail);
        double* gdr = res.grads.d_rel_translation.row(t.relation);
        double* gw = res.grads.d_rel_normal.row(t.relation);
        const double s2 = 2.0 * sign * inv_b;
        for (std::size_t i = 0; i < d; ++i) {
            const double dproj = u[i] - wu * w[i];
            gh[i] += s2 * dproj;
            gt[i] -= s2 * dproj;
            gdr[i] += s2 * u[i];
            gw[i] += s2 * (wu * (tv[i] - hv[i]) + (wt - wh) * u[i]);
        }
    };

    const auto raise_non_finite = [&]() {
        for (const auto& [name, m] :
             std::initializer_list<std::pair<const char*, const Matrix*>>{
                 {"entity_emb", &params.entity_emb},
                 {"rel_translation", &params.rel_translation},
                 {"rel_normal", &params.rel_normal}}) {
            if (!all_finite(m->data())) {
                throw NumericError(name, "non-finite value in TransH forward pass");
            }
        }
        throw NumericError("loss", "non-finite TransH loss with finite parameters");
    };

    double loss = 0.0;
    for (const auto& pair : batch) {
        const double d_pos =
            distance_sq(params, pair.pos.head, pair.pos.relation, pair.pos.tail);
        const double d_neg =
            distance_sq(params, pair.neg.head, pair.neg.relation, pair.neg.tail);
        if (!std::isfinite(d_pos) || !std::isfinite(d_neg)) raise_non_finite();
        const double hinge = margin + d_pos - d_neg;
        if (hinge > 0.0) {
            loss += hinge;
            accumulate(pair.pos, +1.0);
            accumulate(pair.neg, -1.0);
        }
    }
    res.loss = loss * inv_b;
    if (!std::isfinite(res.loss)) raise_non_finite();
    return res;
}

}  // namespace tkg
