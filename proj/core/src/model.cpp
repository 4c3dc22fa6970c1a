#include "threatkg/model.hpp"

#include "threatkg/error.hpp"

namespace tkg {

std::string_view model_kind_name(ModelKind k) {
    return k == ModelKind::transh ? "transh" : "tucker";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "transh") return ModelKind::transh;
    if (name == "tucker") return ModelKind::tucker;
    throw DomainError("unknown model kind: \"" + std::string(name) + "\"");
}

namespace {

class TransHModel final : public LinkPredictor {
public:
    explicit TransHModel(TransHParams params) : params_(std::move(params)) {}

    ModelKind kind() const override { return ModelKind::transh; }
    std::size_t n_entities() const override { return params_.n_entities(); }
    std::size_t n_relations() const override { return params_.n_relations(); }

    double score(EntityId h, RelationId r, EntityId t) const override {
        return score_transh(params_, h, r, t);
    }

    std::vector<double> score_candidates(EntityId known, RelationId rel,
                                         Direction missing) const override {
        return score_transh_candidates(params_, known, rel, missing);
    }

    double confidence(double plausibility) const override {
        return transh_confidence(plausibility);
    }

private:
    TransHParams params_;
};

class TuckerModel final : public LinkPredictor {
public:
    explicit TuckerModel(TuckerParams params) : params_(std::move(params)) {}

    ModelKind kind() const override { return ModelKind::tucker; }
    std::size_t n_entities() const override { return params_.n_entities(); }
    std::size_t n_relations() const override { return params_.n_base_relations(); }

    double score(EntityId h, RelationId r, EntityId t) const override {
        return score_tucker(params_, h, r, t);
    }

    std::vector<double> score_candidates(EntityId known, RelationId rel,
                                         Direction missing) const override {
        if (rel >= params_.n_base_relations()) {
            throw DomainError("relation id out of range for model");
        }
        // Head queries run through the synthesized reciprocal relation.
        const RelationId effective =
            missing == Direction::tail
                ? rel
                : reciprocal_relation(rel, params_.n_base_relations());
        return score_tucker_all_tails(params_, known, effective);
    }

    double confidence(double plausibility) const override {
        return tucker_confidence(plausibility);
    }

private:
    TuckerParams params_;
};

}  // namespace

std::unique_ptr<LinkPredictor> make_predictor(const ModelParams& params) {
    if (std::holds_alternative<TransHParams>(params)) {
        return std::make_unique<TransHModel>(std::get<TransHParams>(params));
    }
    return std::make_unique<TuckerModel>(std::get<TuckerParams>(params));
}

ModelKind params_kind(const ModelParams& params) {
    return std::holds_alternative<TransHParams>(params) ? ModelKind::transh : ModelKind::tucker;
}

}  // namespace tkg
