#include <doctest.h>

#include <threatkg/ingest.hpp>

#include "helpers.hpp"

using namespace tkg;
using namespace tkgtest;

TEST_CASE("triple lines parse into trimmed fields") {
    const auto raw = parse_triple_file("DUSTMAN\tsimilarTo\tZeroCleare\n");
    REQUIRE(raw.size() == 1);
    CHECK(raw[0].head == "DUSTMAN");
    CHECK(raw[0].relation == "similarTo");
    CHECK(raw[0].tail == "ZeroCleare");
    CHECK(raw[0].line_no == 1);
}

TEST_CASE("defanged indicators keep their brackets verbatim") {
    const auto raw = parse_triple_file("intel-update[.]com\tindicates\tStealer\n");
    REQUIRE(raw.size() == 1);
    CHECK(raw[0].head == "intel-update[.]com");
}

TEST_CASE("field-count and empty-field errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_triple_file("a\tb\n"), doctest::Contains("line 1"), ParseError);
    CHECK_THROWS_AS(parse_triple_file("ok\tr\tok\na\tb\tc\td\n"), ParseError);
    CHECK_THROWS_WITH_AS(parse_triple_file("a\t\tc\n"), doctest::Contains("empty field"),
                         ParseError);
}

TEST_CASE("comments and blank lines are skipped, order preserved") {
    const auto raw = parse_triple_file("# header\n\na\tr\tb\n  # indented comment\nc\tr\td\n");
    REQUIRE(raw.size() == 2);
    CHECK(raw[0].head == "a");
    CHECK(raw[1].head == "c");
    CHECK(raw[1].line_no == 5);
}

TEST_CASE("class map parses, later duplicates override with a counter") {
    const auto map = parse_class_map("DUSTMAN\tMalware\n");
    CHECK(map.by_surface.at("DUSTMAN") == "Malware");
    CHECK(map.overrides == 0);

    CHECK(parse_class_map("").entries.empty());

    const auto dup = parse_class_map("x\tMalware\ny\tFile\nx\tSoftware\n");
    CHECK(dup.overrides == 1);
    CHECK(dup.by_surface.at("x") == "Software");
    REQUIRE(dup.entries.size() == 2);
    CHECK(dup.entries[0].first == "x");   // position of first occurrence kept
    CHECK(dup.entries[0].second == "Software");

    CHECK_THROWS_AS(parse_class_map("justonefield\n"), ParseError);
}

TEST_CASE("the DUSTMAN corpus ingests cleanly under the shipped schema") {
    const auto result = ingest_corpus(dustman_triples(), dustman_classes(), default_schema());
    CHECK(result.report.accepted == 7);
    CHECK(result.report.rejected.empty());
    CHECK(result.report.duplicates == 0);
    CHECK(result.report.unchecked == 0);
    CHECK(result.store.n_triples() == 7);
    CHECK(result.store.entity(0).class_name == "Malware");
}

TEST_CASE("a Malware-Location triple is rejected with rule detail") {
    const auto triples = dustman_triples() + "DUSTMAN\tsimilarTo\tTroy\n";
    const auto classes = dustman_classes() + "Troy\tLocation\n";
    const auto result = ingest_corpus(triples, classes, default_schema());
    CHECK(result.report.accepted == 7);
    REQUIRE(result.report.rejected.size() == 1);
    const auto& rej = result.report.rejected[0];
    CHECK(rej.line_no == 8);
    CHECK(rej.why.verdict == Verdict::violates_rule);
    CHECK(rej.raw == "DUSTMAN\tsimilarTo\tTroy");
    CHECK(!result.store.contains(
        {*result.store.find_entity("DUSTMAN"), *result.store.find_relation("similarTo"),
         *result.store.find_entity("Troy")}));
    // Troy stays in the vocabulary (it came from the class map).
    CHECK(result.store.find_entity("Troy").has_value());
}

TEST_CASE("a comments-only file yields an empty store") {
    const auto result = ingest_corpus("# nothing here\n", "", default_schema());
    CHECK(result.report.accepted == 0);
    CHECK(result.store.n_triples() == 0);
    CHECK(result.store.n_entities() == 0);
}

TEST_CASE("report totals account for every parsed line") {
    // 7 clean + 1 duplicate + 1 rejected = 9 non-comment lines
    const auto triples =
        dustman_triples() + "DUSTMAN\tsimilarTo\tZeroCleare\nDUSTMAN\tsimilarTo\tTroy\n";
    const auto classes = dustman_classes() + "Troy\tLocation\n";
    const auto result = ingest_corpus(triples, classes, default_schema());
    CHECK(result.report.accepted == 7);
    CHECK(result.report.duplicates == 1);
    CHECK(result.report.rejected.size() == 1);
    CHECK(result.report.total_lines() == 9);
}

TEST_CASE("unlabeled entities skip validation and are counted unchecked") {
    const auto triples = "mystery.exe\tdrops\tpayload.bin\nmystery.exe\tdrops\tother.bin\n";
    const auto result = ingest_corpus(triples, "other.bin\tFile\n", default_schema());
    CHECK(result.report.accepted == 2);
    CHECK(result.report.rejected.empty());
    CHECK(result.report.unchecked == 2);  // mystery.exe and payload.bin, distinct
    // class-map surfaces come first in the vocabulary
    CHECK(result.store.entity(0).surface == "other.bin");
    CHECK(result.store.entity(1).surface == "mystery.exe");
}

TEST_CASE("accepted triples validate, rejected ones do not") {
    const auto triples = dustman_triples() +
                         "DUSTMAN\tsimilarTo\tTroy\n"
                         "agent.exe\tsimilarTo\tDUSTMAN\n";  // File similarTo Malware -> reject
    const auto classes = dustman_classes() + "Troy\tLocation\n";
    const auto result = ingest_corpus(triples, classes, default_schema());
    const auto& schema = default_schema();
    const auto map = parse_class_map(classes);

    for (const auto& t : result.store.triples()) {
        const auto& head = result.store.entity(t.head);
        const auto& tail = result.store.entity(t.tail);
        const auto& rel = result.store.relation(t.relation);
        const auto verdict =
            validate_triple(schema, head.class_name, rel.name, tail.class_name).verdict;
        CHECK(verdict == Verdict::valid);
    }
    CHECK(result.report.rejected.size() == 2);
    for (const auto& rej : result.report.rejected) {
        CHECK(rej.why.verdict != Verdict::valid);
    }
}

TEST_CASE("ingest is idempotent over its own serialized triples") {
    const auto first = ingest_corpus(dustman_triples(), dustman_classes(), default_schema());
    const auto replay =
        ingest_corpus(store_triples_tsv(first.store), dustman_classes(), default_schema());
    CHECK(replay.store.to_text() == first.store.to_text());
}

TEST_CASE("report serializers cover the counters") {
    const auto triples = dustman_triples() + "DUSTMAN\tsimilarTo\tTroy\n";
    const auto classes = dustman_classes() + "Troy\tLocation\n";
    const auto result = ingest_corpus(triples, classes, default_schema());
    const auto text = result.report.to_text();
    CHECK(text.find("accepted    7") != std::string::npos);
    CHECK(text.find("violates_rule") != std::string::npos);
    const auto json = result.report.to_json();
    CHECK(json.find("\"accepted\":7") != std::string::npos);
    CHECK(json.find("\"line\":8") != std::string::npos);
}

TEST_CASE("missing files raise IoError") {
    CHECK_THROWS_AS(ingest_files("/nonexistent/triples.tsv", "/nonexistent/classes.tsv",
                                 default_schema()),
                    IoError);
}
