#include "threatkg/schema.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "threatkg/text.hpp"

namespace tkg {

bool OntologySchema::allows(std::string_view relation, std::string_view domain,
                            std::string_view range) const {
    const auto it = rules.find(std::string(relation));
    if (it == rules.end()) return false;
    for (const auto& p : it->second) {
        if (p.domain == domain && p.range == range) return true;
    }
    return false;
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::valid: return "valid";
        case Verdict::violates_rule: return "violates_rule";
        case Verdict::unknown_relation: return "unknown_relation";
        case Verdict::unknown_class: return "unknown_class";
    }
    return "?";
}

namespace {

std::string_view strip_comment(std::string_view line) {
    const auto pos = line.find('#');
    if (pos != std::string_view::npos) line = line.substr(0, pos);
    return trim(line);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

}  // namespace

OntologySchema parse_schema(std::string_view text) {
    OntologySchema schema;
    enum class Section { none, classes, rules } section = Section::none;

    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto line = strip_comment(lines[i]);
        if (line.empty()) continue;
        if (line == "[classes]") {
            section = Section::classes;
            continue;
        }
        if (line == "[rules]") {
            section = Section::rules;
            continue;
        }
        switch (section) {
            case Section::none:
                throw ParseError(line_no, "content before any [classes]/[rules] section");
            case Section::classes: {
                const auto fields = split_ws(line);
                if (fields.size() != 1) {
                    throw ParseError(line_no, "class declarations are one name per line");
                }
                const std::string name(fields[0]);
                if (!schema.class_set.insert(name).second) {
                    throw ParseError(line_no, "class declared twice: " + name);
                }
                schema.classes.push_back(name);
                break;
            }
            case Section::rules: {
                const auto fields = split_ws(line);
                if (fields.size() != 3) {
                    throw ParseError(line_no,
                                     "rule lines are: <relation> <domain-class> <range-class>");
                }
                const std::string rel(fields[0]);
                const ClassPair pair{std::string(fields[1]), std::string(fields[2])};
                for (const auto& cls : {pair.domain, pair.range}) {
                    if (!schema.has_class(cls)) {
                        throw ParseError(line_no, "rule for \"" + rel +
                                                      "\" references undeclared class \"" + cls +
                                                      "\"");
                    }
                }
                auto& pairs = schema.rules[rel];
                if (std::find(pairs.begin(), pairs.end(), pair) == pairs.end()) {
                    pairs.push_back(pair);
                }
                break;
            }
        }
    }

    for (const auto& [rel, pairs] : schema.rules) {
        if (pairs.empty()) throw DomainError("relation \"" + rel + "\" has no allowed pairs");
    }
    return schema;
}

OntologySchema load_schema_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open schema file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_schema(ss.str());
}

ValidationResult validate_triple(const OntologySchema& schema, std::string_view head_class,
                                 std::string_view relation_name, std::string_view tail_class) {
    const auto it = schema.rules.find(std::string(relation_name));
    if (it == schema.rules.end()) {
        return {Verdict::unknown_relation,
                "relation \"" + std::string(relation_name) + "\" is not in the schema"};
    }
    for (const auto cls : {head_class, tail_class}) {
        if (!schema.has_class(cls)) {
            return {Verdict::unknown_class,
                    "class \"" + std::string(cls) + "\" is not declared in the schema"};
        }
    }
    for (const auto& p : it->second) {
        if (p.domain == head_class && p.range == tail_class) {
            return {Verdict::valid, "rule " + std::string(relation_name) + "(" + p.domain + ", " +
                                        p.range + ") matched"};
        }
    }
    std::string allowed;
    for (const auto& p : it->second) {
        if (!allowed.empty()) allowed += ", ";
        allowed += "(" + p.domain + ", " + p.range + ")";
    }
    return {Verdict::violates_rule, "relation \"" + std::string(relation_name) + "\" admits " +
                                        allowed + "; got (" + std::string(head_class) + ", " +
                                        std::string(tail_class) + ")"};
}

ClassResolution resolve_class(std::span<const ClassCandidate> candidates,
                              std::string_view relation_name, SlotPosition position,
                              const OntologySchema& schema) {
    if (candidates.empty()) throw DomainError("resolve_class requires at least one candidate");
    for (const auto& c : candidates) {
        if (c.confidence < 0.0 || c.confidence > 1.0) {
            throw DomainError("candidate confidence out of [0,1] for class \"" + c.class_name +
                              "\"");
        }
    }
    const auto it = schema.rules.find(std::string(relation_name));
    if (it == schema.rules.end()) {
        throw DomainError("unknown relation \"" + std::string(relation_name) + "\"");
    }

    ClassResolution res;
    for (const auto& c : candidates) {
        const bool admissible = std::any_of(
            it->second.begin(), it->second.end(), [&](const ClassPair& p) {
                return (position == SlotPosition::head ? p.domain : p.range) == c.class_name;
            });
        if (admissible) res.admissible.push_back(c);
    }
    if (res.admissible.empty()) {
        throw NoAdmissibleClassError(
            "no candidate class is admissible at the " +
                std::string(position == SlotPosition::head ? "head" : "tail") + " of \"" +
                std::string(relation_name) + "\"",
            std::vector<ClassCandidate>(candidates.begin(), candidates.end()));
    }

    const auto best = std::max_element(
        res.admissible.begin(), res.admissible.end(),
        [](const ClassCandidate& a, const ClassCandidate& b) { return a.confidence < b.confidence; });
    // Exact-tie check; near-ties resolve to the max (spec'd exact comparison).
    const std::size_t top_count = static_cast<std::size_t>(std::count_if(
        res.admissible.begin(), res.admissible.end(),
        [&](const ClassCandidate& c) { return c.confidence == best->confidence; }));
    if (top_count > 1) {
        res.ambiguous = true;
        return res;
    }
    res.class_name = best->class_name;
    return res;
}

}  // namespace tkg
