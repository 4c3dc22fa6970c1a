#include "threatkg/ingest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "threatkg/text.hpp"

namespace tkg {

namespace {

bool skip_line(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<RawTriple> parse_triple_file(std::string_view text) {
    std::vector<RawTriple> out;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (skip_line(lines[i])) continue;
        const auto fields = split(lines[i], '\t');
        if (fields.size() != 3) {
            throw ParseError(line_no, "expected 3 tab-separated fields, got " +
                                          std::to_string(fields.size()));
        }
        RawTriple t;
        t.head = std::string(trim(fields[0]));
        t.relation = std::string(trim(fields[1]));
        t.tail = std::string(trim(fields[2]));
        t.line_no = line_no;
        if (t.head.empty() || t.relation.empty() || t.tail.empty()) {
            throw ParseError(line_no, "empty field in triple line");
        }
        out.push_back(std::move(t));
    }
    return out;
}

ClassMap parse_class_map(std::string_view text) {
    ClassMap map;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (skip_line(lines[i])) continue;
        const auto fields = split(lines[i], '\t');
        if (fields.size() != 2) {
            throw ParseError(line_no, "expected 2 tab-separated fields, got " +
                                          std::to_string(fields.size()));
        }
        const std::string surface(trim(fields[0]));
        const std::string cls(trim(fields[1]));
        if (surface.empty() || cls.empty()) {
            throw ParseError(line_no, "empty field in class map line");
        }
        const auto it = map.by_surface.find(surface);
        if (it != map.by_surface.end()) {
            // Last entry wins; keep the surface's original position.
            ++map.overrides;
            it->second = cls;
            for (auto& e : map.entries) {
                if (e.first == surface) {
                    e.second = cls;
                    break;
                }
            }
        } else {
            map.by_surface.emplace(surface, cls);
            map.entries.emplace_back(surface, cls);
        }
    }
    return map;
}

IngestResult ingest_corpus(std::string_view triples_text, std::string_view classmap_text,
                           const OntologySchema& schema) {
    const ClassMap classes = parse_class_map(classmap_text);
    const std::vector<RawTriple> parsed = parse_triple_file(triples_text);

    IngestReport report;
    report.class_map_overrides = classes.overrides;

    std::vector<RawTriple> admissible;
    admissible.reserve(parsed.size());
    std::set<std::string> unchecked_surfaces;

    for (const auto& rt : parsed) {
        const auto head_it = classes.by_surface.find(rt.head);
        const auto tail_it = classes.by_surface.find(rt.tail);
        if (head_it == classes.by_surface.end() || tail_it == classes.by_surface.end()) {
            // Unlabeled endpoint: rule validation is skipped, triple admitted.
            if (head_it == classes.by_surface.end()) unchecked_surfaces.insert(rt.head);
            if (tail_it == classes.by_surface.end()) unchecked_surfaces.insert(rt.tail);
            admissible.push_back(rt);
            continue;
        }
        const ValidationResult vr =
            validate_triple(schema, head_it->second, rt.relation, tail_it->second);
        if (vr.verdict == Verdict::valid) {
            admissible.push_back(rt);
        } else {
            report.rejected.push_back(
                {rt.line_no, rt.head + "\t" + rt.relation + "\t" + rt.tail, vr});
        }
    }
    report.unchecked = unchecked_surfaces.size();

    // Entity vocabulary: class-map surfaces in file order, then unlabeled
    // surfaces from accepted triples in first-seen order.
    std::vector<Entity> entities;
    std::unordered_map<std::string, EntityId> seen;
    entities.reserve(classes.entries.size());
    for (const auto& [surface, cls] : classes.entries) {
        seen.emplace(surface, static_cast<EntityId>(entities.size()));
        entities.push_back(Entity{0, surface, cls});
    }
    for (const auto& rt : admissible) {
        for (const auto* surface : {&rt.head, &rt.tail}) {
            if (!seen.contains(*surface)) {
                seen.emplace(*surface, static_cast<EntityId>(entities.size()));
                entities.push_back(Entity{0, *surface, ""});
            }
        }
    }

    IngestResult result{TripleStore::build(std::move(entities), admissible, &report.duplicates),
                        std::move(report)};
    result.report.accepted = result.store.n_triples();
    return result;
}

IngestResult ingest_files(const std::string& triples_path, const std::string& classmap_path,
                          const OntologySchema& schema) {
    return ingest_corpus(read_file(triples_path), read_file(classmap_path), schema);
}

std::string IngestReport::to_text() const {
    std::ostringstream out;
    out << "accepted    " << accepted << "\n"
        << "rejected    " << rejected.size() << "\n"
        << "duplicates  " << duplicates << "\n"
        << "unchecked   " << unchecked << "\n";
    if (class_map_overrides > 0) {
        out << "class map overrides  " << class_map_overrides << "\n";
    }
    for (const auto& r : rejected) {
        out << "  line " << r.line_no << " [" << verdict_name(r.why.verdict) << "] " << r.raw
            << "\n    " << r.why.detail << "\n";
    }
    return out.str();
}

std::string IngestReport::to_json() const {
    std::ostringstream out;
    out << "{\"accepted\":" << accepted << ",\"duplicates\":" << duplicates
        << ",\"unchecked\":" << unchecked << ",\"class_map_overrides\":" << class_map_overrides
        << ",\"rejected\":[";
    for (std::size_t i = 0; i < rejected.size(); ++i) {
        const auto& r = rejected[i];
        if (i) out << ",";
        out << "{\"line\":" << r.line_no << ",\"raw\":\"" << json_escape(r.raw)
            << "\",\"verdict\":\"" << verdict_name(r.why.verdict) << "\",\"detail\":\""
            << json_escape(r.why.detail) << "\"}";
    }
    out << "]}";
    return out.str();
}

}  // namespace tkg
