#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "threatkg/error.hpp"

namespace tkg {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Entity {
    EntityId id = 0;
    std::string surface;     // verbatim label, e.g. "intel-update[.]com"
    std::string class_name;  // ontology class; empty until classified
};

struct Relation {
    RelationId id = 0;
    std::string name;
    bool is_reciprocal = false;  // synthesized inverse, id >= n_r
};

struct Triple {
    EntityId head = 0;
    RelationId relation = 0;
    EntityId tail = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (const std::uint64_t v : {static_cast<std::uint64_t>(t.head),
                                      static_cast<std::uint64_t>(t.relation),
                                      static_cast<std::uint64_t>(t.tail)}) {
            h ^= v;
            h *= 0x100000001b3ull;
        }
        return static_cast<std::size_t>(h);
    }
};

using TripleSet = std::unordered_set<Triple, TripleHash>;

struct GraphStats {
    std::size_t n_entities = 0;
    std::size_t n_relations = 0;
    std::size_t n_triples = 0;
    double avg_degree = 0.0;  // n_t / n_e
    double density = 0.0;     // n_t / n_e^2
};

// Unresolved triple as read from a file; surfaces, not ids.
struct RawTriple {
    std::string head;
    std::string relation;
    std::string tail;
    std::size_t line_no = 0;  // 1-based source line, 0 if synthetic
};

// Immutable, indexed store for the knowledge graph. Entity and relation ids
// are dense and assigned in first-seen order; the triple set is deduplicated.
// Construction is single-threaded; afterwards the store is read-only and safe
// for unlimited concurrent readers.
class TripleStore {
public:
    // Builds a store from an entity vocabulary and raw triples. Relation ids
    // are assigned in first-seen order over the triple list. Entity ids follow
    // the order of `entities`; a triple referencing an unlisted surface is a
    // DomainError naming the offending triple. Duplicate triples are dropped
    // and counted into *duplicates when provided.
    static TripleStore build(std::vector<Entity> entities,
                             std::span<const RawTriple> raw,
                             std::size_t* duplicates = nullptr);

    std::size_t n_entities() const { return entities_.size(); }
    std::size_t n_relations() const { return relations_.size(); }
    std::size_t n_triples() const { return triples_.size(); }

    const Entity& entity(EntityId id) const;
    const Relation& relation(RelationId id) const;
    std::span<const Entity> entities() const { return entities_; }
    std::span<const Relation> relations() const { return relations_; }
    std::span<const Triple> triples() const { return triples_; }

    std::optional<EntityId> find_entity(std::string_view surface) const;
    std::optional<RelationId> find_relation(std::string_view name) const;

    bool contains(const Triple& t) const { return triple_set_.contains(t); }

    // Exact index lookups; ascending id order, empty when no match.
    std::span<const EntityId> known_tails(EntityId head, RelationId relation) const;
    std::span<const EntityId> known_heads(RelationId relation, EntityId tail) const;

    // n_e >= 1 required (density divides by n_e^2).
    GraphStats stats() const;

    // Resolves raw surfaces against this store's vocabulary.
    std::vector<Triple> resolve(std::span<const RawTriple> raw) const;

    std::vector<std::string> entity_surfaces() const;

    // Structured-text serialization; see docs/FORMATS.md for the layout.
    void save(std::ostream& out) const;
    std::string to_text() const;
    static TripleStore load(std::istream& in);
    static TripleStore from_text(std::string_view text);
    static TripleStore load_file(const std::string& path);
    void save_file(const std::string& path) const;

private:
    using PairKey = std::uint64_t;
    static PairKey pair_key(std::uint32_t a, std::uint32_t b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }

    void index_triple(const Triple& t);
    void finalize_indexes();

    std::vector<Entity> entities_;
    std::vector<Relation> relations_;
    std::vector<Triple> triples_;  // insertion order, deduplicated
    TripleSet triple_set_;
    std::unordered_map<std::string, EntityId> entity_by_surface_;
    std::unordered_map<std::string, RelationId> relation_by_name_;
    std::unordered_map<PairKey, std::vector<EntityId>> by_head_rel_;
    std::unordered_map<PairKey, std::vector<EntityId>> by_rel_tail_;
};

}  // namespace tkg
