#pragma once

#include <string>
#include <vector>

#include <threatkg/ingest.hpp>
#include <threatkg/rng.hpp>
#include <threatkg/schema.hpp>
#include <threatkg/triple_store.hpp>

namespace tkgtest {

// The seven-triple DUSTMAN wiper corpus used across the suite.
inline std::string dustman_triples() {
    return "DUSTMAN\tsimilarTo\tZeroCleare\n"
           "DUSTMAN\tinvolves\tTurla Driver Loader(TDL)\n"
           "ZeroCleare\tinvolves\tTurla Driver Loader(TDL)\n"
           "DUSTMAN\tinvolves\tdustman.exe\n"
           "dustman.exe\tdrops\tassistant.sys\n"
           "dustman.exe\tdrops\telrawdisk.sys\n"
           "dustman.exe\tdrops\tagent.exe\n";
}

inline std::string dustman_classes() {
    return "DUSTMAN\tMalware\n"
           "ZeroCleare\tMalware\n"
           "Turla Driver Loader(TDL)\tApplication\n"
           "dustman.exe\tFile\n"
           "assistant.sys\tFile\n"
           "elrawdisk.sys\tFile\n"
           "agent.exe\tFile\n";
}

inline const tkg::OntologySchema& default_schema() {
    static const tkg::OntologySchema schema = tkg::load_schema_file(THREATKG_DEFAULT_SCHEMA);
    return schema;
}

inline tkg::TripleStore dustman_store() {
    return tkg::ingest_corpus(dustman_triples(), dustman_classes(), default_schema()).store;
}

// Random store with exactly n_t distinct triples over n_e entities and up to
// n_r relations.
inline tkg::TripleStore random_store(tkg::Rng& rng, std::size_t n_e, std::size_t n_r,
                                     std::size_t n_t) {
    std::vector<tkg::Entity> entities;
    for (std::size_t i = 0; i < n_e; ++i) {
        entities.push_back({0, "e" + std::to_string(i), ""});
    }
    tkg::TripleSet seen;
    std::vector<tkg::RawTriple> raw;
    while (seen.size() < n_t) {
        const auto h = static_cast<tkg::EntityId>(rng.uniform_index(n_e));
        const auto r = static_cast<tkg::RelationId>(rng.uniform_index(n_r));
        const auto t = static_cast<tkg::EntityId>(rng.uniform_index(n_e));
        if (!seen.insert({h, r, t}).second) continue;
        raw.push_back({"e" + std::to_string(h), "r" + std::to_string(r),
                       "e" + std::to_string(t)});
    }
    return tkg::TripleStore::build(std::move(entities), raw);
}

// Renders a store's triples back to TSV (surfaces), in stored order.
inline std::string store_triples_tsv(const tkg::TripleStore& store) {
    std::string out;
    for (const auto& t : store.triples()) {
        out += store.entity(t.head).surface;
        out += '\t';
        out += store.relation(t.relation).name;
        out += '\t';
        out += store.entity(t.tail).surface;
        out += '\n';
    }
    return out;
}

}  // namespace tkgtest
