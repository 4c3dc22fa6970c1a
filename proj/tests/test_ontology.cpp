#include <doctest.h>

#include <threatkg/schema.hpp>

#include "helpers.hpp"

using namespace tkg;
using namespace tkgtest;

TEST_CASE("shipped schema declares the core CTI relationships") {
    const auto& schema = default_schema();
    for (const char* rel : {"similarTo", "involves", "drops", "indicates", "involvesMalware",
                            "hasVulnerability", "targets", "uses", "communicates_with"}) {
        CHECK_MESSAGE(schema.has_relation(rel), rel);
    }
    CHECK(schema.allows("similarTo", "Malware", "Malware"));
    for (const auto& [rel, pairs] : schema.rules) {
        CHECK(!pairs.empty());
        for (const auto& p : pairs) {
            CHECK(schema.has_class(p.domain));
            CHECK(schema.has_class(p.range));
        }
    }
}

TEST_CASE("rule naming an undeclared class is rejected") {
    CHECK_THROWS_WITH_AS(parse_schema("[classes]\nMalware\n[rules]\nuses\tMalware\tFoo\n"),
                         doctest::Contains("Foo"), ParseError);
}

TEST_CASE("multiple relationships between the same class pair are legal") {
    const auto schema = parse_schema(
        "[classes]\nMalware\nApplication\n[rules]\n"
        "uses\tMalware\tApplication\ncommunicates_with\tMalware\tApplication\n");
    CHECK(schema.allows("uses", "Malware", "Application"));
    CHECK(schema.allows("communicates_with", "Malware", "Application"));
}

TEST_CASE("schema format accepts comments and mixed whitespace") {
    const auto schema = parse_schema(
        "# heading comment\n[classes]\nMalware   # trailing comment\nLocation\n\n"
        "[rules]\ntargets   Malware    Location\n");
    CHECK(schema.allows("targets", "Malware", "Location"));
    CHECK_THROWS_AS(parse_schema("Malware\n"), ParseError);  // content before a section
}

TEST_CASE("validate_triple verdicts") {
    const auto& schema = default_schema();
    CHECK(validate_triple(schema, "Malware", "similarTo", "Malware").verdict == Verdict::valid);

    const auto violation = validate_triple(schema, "Malware", "similarTo", "Location");
    CHECK(violation.verdict == Verdict::violates_rule);
    CHECK(violation.detail.find("similarTo") != std::string::npos);
    CHECK(violation.detail.find("Location") != std::string::npos);

    CHECK(validate_triple(schema, "Malware", "frobnicates", "Software").verdict ==
          Verdict::unknown_relation);
    CHECK(validate_triple(schema, "Malware", "similarTo", "NotAClass").verdict ==
          Verdict::unknown_class);
}

TEST_CASE("validation is pure: repeated calls agree") {
    const auto& schema = default_schema();
    const auto a = validate_triple(schema, "Indicator", "indicates", "Malware");
    const auto b = validate_triple(schema, "Indicator", "indicates", "Malware");
    CHECK(a.verdict == b.verdict);
    CHECK(a.detail == b.detail);
    CHECK(a.verdict == Verdict::valid);
}

TEST_CASE("exhaustive class-pair sweep matches the rule table exactly") {
    const auto& schema = default_schema();
    for (const auto& [rel, pairs] : schema.rules) {
        for (const auto& head : schema.classes) {
            for (const auto& tail : schema.classes) {
                const bool allowed = schema.allows(rel, head, tail);
                const auto verdict = validate_triple(schema, head, rel, tail).verdict;
                CHECK(verdict == (allowed ? Verdict::valid : Verdict::violates_rule));
            }
        }
    }
}

TEST_CASE("resolve_class filters by the rule engine before comparing confidence") {
    const auto& schema = default_schema();
    const std::vector<ClassCandidate> candidates{{"Malware", 0.9}, {"Location", 0.9}};
    const auto res = resolve_class(candidates, "similarTo", SlotPosition::head, schema);
    CHECK(!res.ambiguous);
    CHECK(res.class_name == "Malware");
}

TEST_CASE("exact confidence ties are ambiguous, near-ties are not") {
    const auto schema = parse_schema(
        "[classes]\nMalware\nCampaign\n[rules]\n"
        "uses\tMalware\tCampaign\nuses\tCampaign\tCampaign\n");
    const std::vector<ClassCandidate> tied{{"Malware", 0.7}, {"Campaign", 0.7}};
    CHECK(resolve_class(tied, "uses", SlotPosition::head, schema).ambiguous);

    const std::vector<ClassCandidate> near{{"Malware", 0.7}, {"Campaign", 0.7000001}};
    const auto res = resolve_class(near, "uses", SlotPosition::head, schema);
    CHECK(!res.ambiguous);
    CHECK(res.class_name == "Campaign");
}

TEST_CASE("single admissible candidate wins outright") {
    const auto& schema = default_schema();
    const std::vector<ClassCandidate> one{{"Indicator", 0.4}};
    const auto res = resolve_class(one, "indicates", SlotPosition::head, schema);
    CHECK(res.class_name == "Indicator");
}

TEST_CASE("no admissible candidate raises an error carrying the rejects") {
    const auto& schema = default_schema();
    const std::vector<ClassCandidate> bad{{"Location", 0.9}, {"Person", 0.8}};
    try {
        resolve_class(bad, "similarTo", SlotPosition::head, schema);
        FAIL("expected NoAdmissibleClassError");
    } catch (const NoAdmissibleClassError& e) {
        REQUIRE(e.rejected().size() == 2);
        CHECK(e.rejected()[0].class_name == "Location");
        CHECK(e.rejected()[1].class_name == "Person");
    }
}

TEST_CASE("resolve_class never returns a class inadmissible at its position") {
    const auto& schema = default_schema();
    Rng rng(17);
    std::vector<std::string> all_classes = schema.classes;
    std::vector<std::string> relations;
    for (const auto& [rel, pairs] : schema.rules) relations.push_back(rel);

    for (int round = 0; round < 200; ++round) {
        const auto& rel = relations[rng.uniform_index(relations.size())];
        const auto position = rng.coin() ? SlotPosition::head : SlotPosition::tail;
        std::vector<ClassCandidate> candidates;
        const std::size_t n = 1 + rng.uniform_index(4);
        for (std::size_t i = 0; i < n; ++i) {
            candidates.push_back({all_classes[rng.uniform_index(all_classes.size())],
                                  rng.uniform_real()});
        }
        try {
            const auto res = resolve_class(candidates, rel, position, schema);
            if (res.ambiguous) continue;
            bool admissible = false;
            for (const auto& p : schema.rules.at(rel)) {
                const auto& cls = position == SlotPosition::head ? p.domain : p.range;
                if (cls == res.class_name) admissible = true;
            }
            CHECK(admissible);
        } catch (const NoAdmissibleClassError&) {
            // acceptable outcome for random candidate sets
        }
    }
}

TEST_CASE("resolve_class validates its inputs") {
    const auto& schema = default_schema();
    CHECK_THROWS_AS(resolve_class({}, "uses", SlotPosition::head, schema), DomainError);
    const std::vector<ClassCandidate> bad_conf{{"Malware", 1.5}};
    CHECK_THROWS_AS(resolve_class(bad_conf, "uses", SlotPosition::head, schema), DomainError);
}
