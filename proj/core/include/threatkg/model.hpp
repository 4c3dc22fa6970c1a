#pragma once

#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "threatkg/transh.hpp"
#include "threatkg/tucker.hpp"

namespace tkg {

enum class ModelKind { transh, tucker };

std::string_view model_kind_name(ModelKind k);
ModelKind parse_model_kind(std::string_view name);

using ModelParams = std::variant<TransHParams, TuckerParams>;

// Read-only scoring facade over trained parameters. Scoring is eval-mode and
// deterministic; instances are safe for unlimited concurrent use.
class LinkPredictor {
public:
    virtual ~LinkPredictor() = default;

    virtual ModelKind kind() const = 0;
    virtual std::size_t n_entities() const = 0;
    virtual std::size_t n_relations() const = 0;  // base relations

    virtual double score(EntityId h, RelationId r, EntityId t) const = 0;

    // Plausibility of every entity substituted into the missing slot.
    virtual std::vector<double> score_candidates(EntityId known, RelationId rel,
                                                 Direction missing) const = 0;

    // Monotone map of plausibility into [0, 1].
    virtual double confidence(double plausibility) const = 0;
};

std::unique_ptr<LinkPredictor> make_predictor(const ModelParams& params);

ModelKind params_kind(const ModelParams& params);

}  // namespace tkg
