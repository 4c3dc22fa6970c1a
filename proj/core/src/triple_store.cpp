#include "threatkg/triple_store.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "threatkg/text.hpp"

namespace tkg {

namespace {

constexpr std::string_view kStoreMagic = "threatkg-store";
constexpr int kStoreVersion = 1;

void require_clean_label(std::string_view label, std::string_view what) {
    if (trim(label).empty()) {
        throw DomainError(std::string(what) + " is empty after trimming");
    }
    if (label.find('\t') != std::string_view::npos ||
        label.find('\n') != std::string_view::npos ||
        label.find('\r') != std::string_view::npos) {
        throw DomainError(std::string(what) + " contains a tab or newline: \"" +
                          std::string(label) + "\"");
    }
}

}  // namespace

TripleStore TripleStore::build(std::vector<Entity> entities,
                               std::span<const RawTriple> raw,
                               std::size_t* duplicates) {
    TripleStore store;
    store.entities_ = std::move(entities);
    for (std::size_t i = 0; i < store.entities_.size(); ++i) {
        auto& e = store.entities_[i];
        e.surface = std::string(trim(e.surface));
        require_clean_label(e.surface, "entity surface");
        e.id = static_cast<EntityId>(i);
        if (!store.entity_by_surface_.emplace(e.surface, e.id).second) {
            throw DomainError("duplicate entity surface: \"" + e.surface + "\"");
        }
    }

    std::size_t dup_count = 0;
    store.triples_.reserve(raw.size());
    for (const auto& rt : raw) {
        const auto head = store.find_entity(trim(rt.head));
        const auto tail = store.find_entity(trim(rt.tail));
        if (!head || !tail) {
            throw DomainError("dangling entity reference in triple <" + rt.head + ", " +
                              rt.relation + ", " + rt.tail + ">");
        }
        const auto rel_name = std::string(trim(rt.relation));
        require_clean_label(rel_name, "relation name");
        RelationId rel;
        if (const auto found = store.find_relation(rel_name)) {
            rel = *found;
        } else {
            rel = static_cast<RelationId>(store.relations_.size());
            store.relations_.push_back(Relation{rel, rel_name, false});
            store.relation_by_name_.emplace(rel_name, rel);
        }
        const Triple t{*head, rel, *tail};
        if (!store.triple_set_.insert(t).second) {
            ++dup_count;
            continue;
        }
        store.triples_.push_back(t);
        store.index_triple(t);
    }
    store.finalize_indexes();
    if (duplicates) *duplicates = dup_count;
    return store;
}

void TripleStore::index_triple(const Triple& t) {
    by_head_rel_[pair_key(t.head, t.relation)].push_back(t.tail);
    by_rel_tail_[pair_key(t.relation, t.tail)].push_back(t.head);
}

void TripleStore::finalize_indexes() {
    for (auto& [k, v] : by_head_rel_) std::sort(v.begin(), v.end());
    for (auto& [k, v] : by_rel_tail_) std::sort(v.begin(), v.end());
}

const Entity& TripleStore::entity(EntityId id) const {
    if (id >= entities_.size()) {
        throw DomainError("entity id out of range: " + std::to_string(id));
    }
    return entities_[id];
}

const Relation& TripleStore::relation(RelationId id) const {
    if (id >= relations_.size()) {
        throw DomainError("relation id out of range: " + std::to_string(id));
    }
    return relations_[id];
}

std::optional<EntityId> TripleStore::find_entity(std::string_view surface) const {
    const auto it = entity_by_surface_.find(std::string(surface));
    if (it == entity_by_surface_.end()) return std::nullopt;
    return it->second;
}

std::optional<RelationId> TripleStore::find_relation(std::string_view name) const {
    const auto it = relation_by_name_.find(std::string(name));
    if (it == relation_by_name_.end()) return std::nullopt;
    return it->second;
}

std::span<const EntityId> TripleStore::known_tails(EntityId head, RelationId relation) const {
    const auto it = by_head_rel_.find(pair_key(head, relation));
    if (it == by_head_rel_.end()) return {};
    return it->second;
}

std::span<const EntityId> TripleStore::known_heads(RelationId relation, EntityId tail) const {
    const auto it = by_rel_tail_.find(pair_key(relation, tail));
    if (it == by_rel_tail_.end()) return {};
    return it->second;
}

GraphStats TripleStore::stats() const {
    if (entities_.empty()) {
        throw DomainError("cannot compute graph statistics on an empty entity set");
    }
    GraphStats s;
    s.n_entities = entities_.size();
    s.n_relations = relations_.size();
    s.n_triples = triples_.size();
    const double ne = static_cast<double>(s.n_entities);
    const double nt = static_cast<double>(s.n_triples);
    s.avg_degree = nt / ne;
    s.density = nt / (ne * ne);
    return s;
}

std::vector<Triple> TripleStore::resolve(std::span<const RawTriple> raw) const {
    std::vector<Triple> out;
    out.reserve(raw.size());
    for (const auto& rt : raw) {
        const auto head = find_entity(trim(rt.head));
        const auto rel = find_relation(trim(rt.relation));
        const auto tail = find_entity(trim(rt.tail));
        if (!head || !rel || !tail) {
            std::string what = "unresolvable triple <" + rt.head + ", " + rt.relation + ", " +
                               rt.tail + ">:";
            if (!head) what += " unknown head entity";
            if (!rel) what += " unknown relation";
            if (!tail) what += " unknown tail entity";
            if (rt.line_no > 0) throw ParseError(rt.line_no, what);
            throw DomainError(what);
        }
        out.push_back(Triple{*head, *rel, *tail});
    }
    return out;
}

std::vector<std::string> TripleStore::entity_surfaces() const {
    std::vector<std::string> out;
    out.reserve(entities_.size());
    for (const auto& e : entities_) out.push_back(e.surface);
    return out;
}

void TripleStore::save(std::ostream& out) const {
    out << kStoreMagic << ' ' << kStoreVersion << '\n';
    out << "entities " << entities_.size() << '\n';
    for (const auto& e : entities_) {
        out << e.id << '\t' << e.surface << '\t'
            << (e.class_name.empty() ? "-" : e.class_name) << '\n';
    }
    out << "relations " << relations_.size() << '\n';
    for (const auto& r : relations_) {
        out << r.id << '\t' << r.name << '\t' << (r.is_reciprocal ? 1 : 0) << '\n';
    }
    out << "triples " << triples_.size() << '\n';
    for (const auto& t : triples_) {
        out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
    }
}

std::string TripleStore::to_text() const {
    std::ostringstream ss;
    save(ss);
    return ss.str();
}

namespace {

struct LineReader {
    std::vector<std::string_view> lines;
    std::size_t next = 0;

    std::string_view take(std::string_view what) {
        if (next >= lines.size()) {
            throw ParseError(lines.size() + 1, "unexpected end of store document, expected " +
                                                   std::string(what));
        }
        return lines[next++];
    }
    std::size_t line_no() const { return next; }  // 1-based number of last taken line
};

std::size_t parse_count(std::string_view line, std::string_view keyword, std::size_t line_no) {
    const auto fields = split(line, ' ');
    if (fields.size() != 2 || fields[0] != keyword) {
        throw ParseError(line_no, "expected \"" + std::string(keyword) + " <count>\"");
    }
    try {
        return std::stoull(std::string(fields[1]));
    } catch (const std::exception&) {
        throw ParseError(line_no, "bad count: \"" + std::string(fields[1]) + "\"");
    }
}

std::uint32_t parse_u32(std::string_view field, std::size_t line_no) {
    try {
        const unsigned long long v = std::stoull(std::string(field));
        if (v > 0xffffffffull) throw std::out_of_range("u32");
        return static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
        throw ParseError(line_no, "bad integer field: \"" + std::string(field) + "\"");
    }
}

}  // namespace

TripleStore TripleStore::from_text(std::string_view text) {
    LineReader rd{split_lines(text)};

    const auto header = split(rd.take("header"), ' ');
    if (header.size() != 2 || header[0] != kStoreMagic) {
        throw ParseError(1, "not a threatkg store document");
    }
    if (header[1] != std::to_string(kStoreVersion)) {
        throw ParseError(1, "unsupported store version: " + std::string(header[1]));
    }

    const std::size_t n_e = parse_count(rd.take("entities"), "entities", rd.line_no());
    std::vector<Entity> entities;
    entities.reserve(n_e);
    for (std::size_t i = 0; i < n_e; ++i) {
        const auto fields = split(rd.take("entity row"), '\t');
        if (fields.size() != 3) throw ParseError(rd.line_no(), "entity row needs 3 fields");
        Entity e;
        e.id = parse_u32(fields[0], rd.line_no());
        if (e.id != i) throw ParseError(rd.line_no(), "entity ids must be dense and ordered");
        e.surface = std::string(fields[1]);
        e.class_name = fields[2] == "-" ? std::string() : std::string(fields[2]);
        entities.push_back(std::move(e));
    }

    const std::size_t n_r = parse_count(rd.take("relations"), "relations", rd.line_no());
    std::vector<Relation> relations;
    relations.reserve(n_r);
    for (std::size_t i = 0; i < n_r; ++i) {
        const auto fields = split(rd.take("relation row"), '\t');
        if (fields.size() != 3) throw ParseError(rd.line_no(), "relation row needs 3 fields");
        Relation r;
        r.id = parse_u32(fields[0], rd.line_no());
        if (r.id != i) throw ParseError(rd.line_no(), "relation ids must be dense and ordered");
        r.name = std::string(fields[1]);
        r.is_reciprocal = fields[2] == "1";
        relations.push_back(std::move(r));
    }

    const std::size_t n_t = parse_count(rd.take("triples"), "triples", rd.line_no());

    TripleStore store;
    store.entities_ = std::move(entities);
    store.relations_ = std::move(relations);
    for (const auto& e : store.entities_) {
        if (!store.entity_by_surface_.emplace(e.surface, e.id).second) {
            throw DomainError("duplicate entity surface in store: \"" + e.surface + "\"");
        }
    }
    for (const auto& r : store.relations_) {
        if (!store.relation_by_name_.emplace(r.name, r.id).second) {
            throw DomainError("duplicate relation name in store: \"" + r.name + "\"");
        }
    }

    store.triples_.reserve(n_t);
    for (std::size_t i = 0; i < n_t; ++i) {
        const auto fields = split(rd.take("triple row"), '\t');
        if (fields.size() != 3) throw ParseError(rd.line_no(), "triple row needs 3 fields");
        Triple t;
        t.head = parse_u32(fields[0], rd.line_no());
        t.relation = parse_u32(fields[1], rd.line_no());
        t.tail = parse_u32(fields[2], rd.line_no());
        if (t.head >= store.n_entities() || t.tail >= store.n_entities() ||
            t.relation >= store.n_relations()) {
            throw ParseError(rd.line_no(), "triple references an id out of range");
        }
        if (!store.triple_set_.insert(t).second) {
            throw ParseError(rd.line_no(), "duplicate triple in store document");
        }
        store.triples_.push_back(t);
        store.index_triple(t);
    }
    store.finalize_indexes();
    return store;
}

TripleStore TripleStore::load(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

TripleStore TripleStore::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open store file: " + path);
    return load(in);
}

void TripleStore::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write store file: " + path);
    save(out);
    if (!out.good()) throw IoError("write failed: " + path);
}

}  // namespace tkg
