#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "threatkg/schema.hpp"
#include "threatkg/triple_store.hpp"

namespace tkg {

struct RejectedLine {
    std::size_t line_no = 0;
    std::string raw;
    ValidationResult why;
};

struct IngestReport {
    std::size_t accepted = 0;    // distinct triples admitted to the store
    std::vector<RejectedLine> rejected;
    std::size_t duplicates = 0;  // admissible lines repeating a stored triple
    std::size_t unchecked = 0;   // distinct entities lacking a class label
    std::size_t class_map_overrides = 0;

    // accepted + |rejected| + duplicates == non-comment lines parsed
    std::size_t total_lines() const { return accepted + rejected.size() + duplicates; }

    std::string to_text() const;
    std::string to_json() const;
};

// One triple per line, three tab-separated fields; '#' lines are comments and
// blank lines are skipped. Fields are trimmed of surrounding whitespace only.
std::vector<RawTriple> parse_triple_file(std::string_view text);

// Entity classification map: "<surface>\t<class>" per line. Later duplicate
// surfaces override earlier ones; overrides are counted for the report.
struct ClassMap {
    std::vector<std::pair<std::string, std::string>> entries;  // file order, deduplicated
    std::unordered_map<std::string, std::string> by_surface;
    std::size_t overrides = 0;
};

ClassMap parse_class_map(std::string_view text);

struct IngestResult {
    TripleStore store;
    IngestReport report;
};

// Validates every parsed triple against the ontology using the mapped classes
// and builds a store from the admissible ones. Entities without class labels
// skip rule validation and are counted as unchecked. The store's entity
// vocabulary is the class map's surfaces (file order) plus any unlabeled
// surfaces from accepted triples in first-seen order.
IngestResult ingest_corpus(std::string_view triples_text, std::string_view classmap_text,
                           const OntologySchema& schema);

IngestResult ingest_files(const std::string& triples_path, const std::string& classmap_path,
                          const OntologySchema& schema);

}  // namespace tkg
