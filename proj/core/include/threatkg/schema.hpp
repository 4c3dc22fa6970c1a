#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "threatkg/error.hpp"

namespace tkg {

struct ClassPair {
    std::string domain;  // head class
    std::string range;   // tail class

    friend bool operator==(const ClassPair&, const ClassPair&) = default;
    friend auto operator<=>(const ClassPair&, const ClassPair&) = default;
};

// Declarative CTI ontology: class names plus per-relationship allowed
// (domain, range) pairs. Immutable after load; all operations are pure.
struct OntologySchema {
    std::vector<std::string> classes;  // declaration order
    std::set<std::string> class_set;
    std::map<std::string, std::vector<ClassPair>> rules;  // relation -> allowed pairs

    bool has_class(std::string_view name) const {
        return class_set.contains(std::string(name));
    }
    bool has_relation(std::string_view name) const {
        return rules.contains(std::string(name));
    }
    bool allows(std::string_view relation, std::string_view domain,
                std::string_view range) const;
};

enum class Verdict { valid, violates_rule, unknown_relation, unknown_class };

std::string_view verdict_name(Verdict v);

struct ValidationResult {
    Verdict verdict = Verdict::valid;
    std::string detail;  // names the rule and classes involved
};

// Parses the schema text format (see docs/FORMATS.md): a [classes] section,
// one name per line, then a [rules] section, one whitespace-separated
// (relation, domain-class, range-class) line each. '#' starts a comment.
OntologySchema parse_schema(std::string_view text);
OntologySchema load_schema_file(const std::string& path);

// Pure rule-engine check of a (head-class, relation, tail-class) triple.
ValidationResult validate_triple(const OntologySchema& schema, std::string_view head_class,
                                 std::string_view relation_name, std::string_view tail_class);

enum class SlotPosition { head, tail };

struct ClassCandidate {
    std::string class_name;
    double confidence = 0.0;  // in [0, 1]
};

struct ClassResolution {
    bool ambiguous = false;
    std::string class_name;                 // set when !ambiguous
    std::vector<ClassCandidate> admissible;  // survivors after rule filtering
};

// Thrown when rule filtering rejects every candidate.
class NoAdmissibleClassError : public DomainError {
public:
    NoAdmissibleClassError(std::string what, std::vector<ClassCandidate> rejected)
        : DomainError(std::move(what)), rejected_(std::move(rejected)) {}
    const std::vector<ClassCandidate>& rejected() const { return rejected_; }

private:
    std::vector<ClassCandidate> rejected_;
};

// Filters candidates to classes admissible at `position` for the relation and
// returns the highest-confidence survivor. An exact confidence tie among the
// top survivors is reported as ambiguous.
ClassResolution resolve_class(std::span<const ClassCandidate> candidates,
                              std::string_view relation_name, SlotPosition position,
                              const OntologySchema& schema);

}  // namespace tkg
