// threatkg: knowledge-graph engine for cyber threat intelligence.
// Subcommands cover the full pipeline: ingest -> stats -> split -> train ->
// eval -> query. Exit codes: 0 success, 1 domain error (validation or
// vocabulary), 2 I/O or usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <threatkg/checkpoint.hpp>
#include <threatkg/ingest.hpp>
#include <threatkg/metrics.hpp>
#include <threatkg/query.hpp>
#include <threatkg/split.hpp>
#include <threatkg/text.hpp>
#include <threatkg/trainer.hpp>

namespace {

using namespace tkg;

constexpr const char* kSchemaEnv = "THREATKG_SCHEMA";

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_or_throw(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
    if (!out.good()) throw IoError("write failed: " + path);
}

OntologySchema load_schema_or_env(const std::string& flag_path) {
    std::string path = flag_path;
    if (path.empty()) {
        if (const char* env = std::getenv(kSchemaEnv)) path = env;
    }
    if (path.empty()) {
        throw IoError(std::string("no schema given: pass --schema or set $") + kSchemaEnv);
    }
    return load_schema_file(path);
}

std::vector<Triple> load_triples_against(const TripleStore& store, const std::string& path) {
    return store.resolve(parse_triple_file(read_file_or_throw(path)));
}

std::string triples_to_tsv(const TripleStore& store, std::span<const Triple> triples) {
    std::string out;
    for (const auto& t : triples) {
        out += store.entity(t.head).surface;
        out += '\t';
        out += store.relation(t.relation).name;
        out += '\t';
        out += store.entity(t.tail).surface;
        out += '\n';
    }
    return out;
}

struct IngestArgs {
    std::string triples, classes, schema, out_store, report_path;
    std::string format = "table";
};

int cmd_ingest(const IngestArgs& args) {
    const auto schema = load_schema_or_env(args.schema);
    const auto result = ingest_files(args.triples, args.classes, schema);
    result.store.save_file(args.out_store);

    const std::string report =
        args.format == "json" ? result.report.to_json() : result.report.to_text();
    if (args.report_path.empty()) {
        std::cout << report;
        if (!report.empty() && report.back() != '\n') std::cout << '\n';
    } else {
        write_file_or_throw(args.report_path, report);
    }
    return 0;
}

struct StatsArgs {
    std::string store_path, name = "store";
    std::string format = "table";
};

int cmd_stats(const StatsArgs& args) {
    const auto store = TripleStore::load_file(args.store_path);
    const auto s = store.stats();
    if (args.format == "json") {
        std::cout << "{\"dataset\":\"" << json_escape(args.name) << "\",\"n_e\":" << s.n_entities
                  << ",\"n_r\":" << s.n_relations << ",\"n_t\":" << s.n_triples
                  << ",\"avg_degree\":" << format_exact(s.avg_degree)
                  << ",\"density\":" << format_exact(s.density) << "}\n";
    } else {
        std::cout << "Dataset  n_e  n_r  n_t  avgDeg  density\n";
        std::cout << args.name << "  " << s.n_entities << "  " << s.n_relations << "  "
                  << s.n_triples << "  " << format_fixed(s.avg_degree, 4) << "  "
                  << format_fixed(s.density, 5) << " (" << format_sci_trunc2(s.density)
                  << ")\n";
    }
    return 0;
}

struct SplitArgs {
    std::string store_path, out_prefix;
    std::string ratios = "0.70,0.15,0.15";
    std::uint64_t seed = 42;
};

int cmd_split(const SplitArgs& args) {
    const auto parts = split(std::string_view(args.ratios), ',');
    if (parts.size() != 3) throw DomainError("--ratios wants three comma-separated numbers");
    SplitRatios ratios;
    try {
        ratios.train = std::stod(std::string(parts[0]));
        ratios.valid = std::stod(std::string(parts[1]));
        ratios.test = std::stod(std::string(parts[2]));
    } catch (const std::exception&) {
        throw DomainError("unparseable --ratios value: " + args.ratios);
    }

    const auto store = TripleStore::load_file(args.store_path);
    const auto result = split_triples(store, ratios, args.seed);
    write_file_or_throw(args.out_prefix + "-train.tsv", triples_to_tsv(store, result.train));
    write_file_or_throw(args.out_prefix + "-valid.tsv", triples_to_tsv(store, result.valid));
    write_file_or_throw(args.out_prefix + "-test.tsv", triples_to_tsv(store, result.test));
    std::cout << "train " << result.train.size() << "\nvalid " << result.valid.size()
              << "\ntest " << result.test.size() << "\n";
    return 0;
}

struct TrainArgs {
    std::string store_path, train_path, valid_path, out_checkpoint, log_path;
    std::string model = "tucker";
    std::string validation_mode = "filtered";
    TrainConfig config;
};

int cmd_train(const TrainArgs& args) {
    const auto store = TripleStore::load_file(args.store_path);
    const auto train_triples = load_triples_against(store, args.train_path);
    std::vector<Triple> valid_triples;
    if (!args.valid_path.empty()) {
        valid_triples = load_triples_against(store, args.valid_path);
    }

    TrainConfig config = args.config;
    config.model = parse_model_kind(args.model);
    config.validation_mode =
        args.validation_mode == "raw" ? RankMode::raw : RankMode::filtered;

    std::ofstream log;
    std::ostream* log_stream = nullptr;
    if (!args.log_path.empty()) {
        log.open(args.log_path, std::ios::trunc);
        if (!log) throw IoError("cannot write log file: " + args.log_path);
        log_stream = &log;
    }

    auto result = train(config, train_triples, valid_triples, store, log_stream);
    const Checkpoint ckpt{std::move(result.params), config, std::move(result.history),
                          vocab_hash(store)};
    save_checkpoint(ckpt, args.out_checkpoint);

    const auto& last = ckpt.history.records.back();
    std::cout << "trained " << args.model << " for " << config.iterations
              << " iterations, final mean loss " << format_fixed(last.mean_loss, 6) << "\n";
    if (result.negative_stats.possibly_true > 0) {
        std::cout << "negative sampling accepted " << result.negative_stats.possibly_true
                  << " possibly-true corruptions\n";
    }
    std::cout << "checkpoint written to " << args.out_checkpoint << "\n";
    return 0;
}

struct EvalArgs {
    std::string store_path, checkpoint_path, test_path, out_path;
    std::string mode = "filtered";
    std::string format = "table";
};

int cmd_eval(const EvalArgs& args) {
    const auto store = TripleStore::load_file(args.store_path);
    const auto ckpt = load_checkpoint(args.checkpoint_path);
    require_vocab_match(ckpt, store);
    const auto test_triples = load_triples_against(store, args.test_path);
    const auto model = make_predictor(ckpt.params);
    const auto mode = args.mode == "raw" ? RankMode::raw : RankMode::filtered;
    const auto report = evaluate(*model, test_triples, store, mode);

    const std::string rendered =
        args.format == "json" ? report.to_json() + "\n" : report.to_table();
    if (args.out_path.empty()) {
        std::cout << rendered;
    } else {
        write_file_or_throw(args.out_path, rendered);
    }
    return 0;
}

struct QueryArgs {
    std::string store_path, checkpoint_path;
    std::string entity, relation;
    std::string missing = "tail";
    std::size_t k = 10;
    bool exclude_known = false;
    std::string format = "table";
    std::size_t explain_rank = 0;  // 0 = off
};

int cmd_query(const QueryArgs& args) {
    const auto store = TripleStore::load_file(args.store_path);
    const auto ckpt = load_checkpoint(args.checkpoint_path);
    require_vocab_match(ckpt, store);
    const auto model = make_predictor(ckpt.params);

    const auto missing = args.missing == "head" ? Direction::head : Direction::tail;
    const auto query = resolve_query(store, args.entity, args.relation, missing);
    const auto predictions = complete(*model, store, query, args.k, args.exclude_known);

    if (args.format == "json") {
        std::cout << predictions_to_json(predictions) << "\n";
    } else {
        std::cout << "<" << (missing == Direction::head ? "?" : args.entity) << ", "
                  << args.relation << ", " << (missing == Direction::head ? args.entity : "?")
                  << ">\n";
        std::cout << predictions_to_table(predictions);
    }

    if (args.explain_rank > 0) {
        if (args.explain_rank > predictions.size()) {
            throw DomainError("--explain rank exceeds the prediction list");
        }
        const auto& target = predictions[args.explain_rank - 1];
        const auto evidence =
            explain(store, target.entity.id, query.known_entity, query.relation);
        std::cout << "supporting triples for \"" << target.entity.surface << "\":\n";
        for (const auto& t : evidence) {
            std::cout << "  <" << store.entity(t.head).surface << ", "
                      << store.relation(t.relation).name << ", "
                      << store.entity(t.tail).surface << ">\n";
        }
        if (evidence.empty()) std::cout << "  (none)\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"threatkg: CTI knowledge-graph engine (ingest, train, evaluate, query)"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest_cmd = app.add_subcommand(
        "ingest", "Validate a triple corpus against the ontology and build a store");
    ingest_cmd->add_option("--triples", ingest_args.triples, "Triple TSV file")->required();
    ingest_cmd->add_option("--classes", ingest_args.classes, "Entity class map TSV")->required();
    ingest_cmd->add_option("--schema", ingest_args.schema,
                           "Ontology schema file (default: $THREATKG_SCHEMA)");
    ingest_cmd->add_option("--out", ingest_args.out_store, "Output store path")->required();
    ingest_cmd->add_option("--report", ingest_args.report_path,
                           "Write the ingest report here instead of stdout");
    ingest_cmd->add_option("--format", ingest_args.format, "Report format: table|json")
        ->check(CLI::IsMember({"table", "json"}));

    StatsArgs stats_args;
    auto* stats_cmd = app.add_subcommand("stats", "Graph statistics of a store");
    stats_cmd->add_option("--store", stats_args.store_path, "Store file")->required();
    stats_cmd->add_option("--name", stats_args.name, "Dataset label for the table row");
    stats_cmd->add_option("--format", stats_args.format, "Output format: table|json")
        ->check(CLI::IsMember({"table", "json"}));

    SplitArgs split_args;
    auto* split_cmd = app.add_subcommand("split", "Deterministic train/valid/test split");
    split_cmd->add_option("--store", split_args.store_path, "Store file")->required();
    split_cmd->add_option("--out-prefix", split_args.out_prefix,
                          "Prefix for <prefix>-{train,valid,test}.tsv")->required();
    split_cmd->add_option("--ratios", split_args.ratios, "Comma-separated ratios summing to 1")->capture_default_str();
    split_cmd->add_option("--seed", split_args.seed, "Shuffle seed")->capture_default_str();

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train an embedding model");
    train_cmd->add_option("--store", train_args.store_path, "Store file")->required();
    train_cmd->add_option("--train", train_args.train_path, "Training triples TSV")->required();
    train_cmd->add_option("--valid", train_args.valid_path, "Validation triples TSV");
    train_cmd->add_option("--model", train_args.model, "Model kind: tucker|transh")->capture_default_str()
        ->check(CLI::IsMember({"tucker", "transh"}));
    train_cmd->add_option("--out", train_args.out_checkpoint, "Checkpoint output path")
        ->required();
    train_cmd->add_option("--log", train_args.log_path, "Training history JSONL path");
    train_cmd->add_option("--d-e", train_args.config.d_e, "Entity embedding dimension")->capture_default_str();
    train_cmd->add_option("--d-r", train_args.config.d_r, "Relation embedding dimension (TuckER)")->capture_default_str();
    train_cmd->add_option("--lr", train_args.config.learning_rate, "Adam learning rate")->capture_default_str();
    train_cmd->add_option("--batch", train_args.config.batch_size, "Mini-batch size")->capture_default_str();
    train_cmd->add_option("--iters", train_args.config.iterations,
                          "Training iterations (full passes)")->capture_default_str();
    train_cmd->add_option("--label-smoothing", train_args.config.label_smoothing,
                          "Label smoothing in [0,1) (TuckER)")->capture_default_str();
    train_cmd->add_option("--margin", train_args.config.margin, "Hinge margin (TransH)")->capture_default_str();
    train_cmd->add_option("--negatives", train_args.config.negatives_per_positive,
                          "Negatives per positive (TransH)")->capture_default_str();
    train_cmd->add_option("--dropout-input", train_args.config.dropout.input,
                          "Input dropout rate (TuckER)")->capture_default_str();
    train_cmd->add_option("--dropout-hidden", train_args.config.dropout.hidden,
                          "Hidden dropout rate (TuckER)")->capture_default_str();
    train_cmd->add_option("--dropout-output", train_args.config.dropout.output,
                          "Output dropout rate (TuckER)")->capture_default_str();
    train_cmd->add_option("--bn-momentum", train_args.config.bn_momentum,
                          "Batch-norm momentum (TuckER)")->capture_default_str();
    train_cmd->add_option("--seed", train_args.config.seed, "Training seed")->capture_default_str();
    train_cmd->add_option("--validate-every", train_args.config.validation_every,
                          "Epochs between validation runs (0 = never)")->capture_default_str();
    train_cmd->add_option("--validation-mode", train_args.validation_mode,
                          "Validation ranking mode: filtered|raw")->capture_default_str()
        ->check(CLI::IsMember({"filtered", "raw"}));
    train_cmd->add_flag("--deterministic", train_args.config.deterministic,
                        "Force deterministic reductions (always on in this build)");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Ranked-candidate evaluation of a checkpoint");
    eval_cmd->add_option("--store", eval_args.store_path, "Store file")->required();
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint_path, "Model checkpoint")
        ->required();
    eval_cmd->add_option("--test", eval_args.test_path, "Test triples TSV")->required();
    eval_cmd->add_option("--mode", eval_args.mode, "Ranking mode: filtered|raw")->capture_default_str()
        ->check(CLI::IsMember({"filtered", "raw"}));
    eval_cmd->add_option("--format", eval_args.format, "Output format: table|json")->capture_default_str()
        ->check(CLI::IsMember({"table", "json"}));
    eval_cmd->add_option("--out", eval_args.out_path, "Write the report here instead of stdout");

    QueryArgs query_args;
    auto* query_cmd =
        app.add_subcommand("query", "Complete an incomplete triple with ranked predictions");
    query_cmd->add_option("entity", query_args.entity, "Known entity surface")->required();
    query_cmd->add_option("relation", query_args.relation, "Relation name")->required();
    query_cmd->add_option("--store", query_args.store_path, "Store file")->required();
    query_cmd->add_option("--checkpoint", query_args.checkpoint_path, "Model checkpoint")
        ->required();
    query_cmd->add_option("--missing", query_args.missing, "Which slot to predict: tail|head")->capture_default_str()
        ->check(CLI::IsMember({"tail", "head"}));
    query_cmd->add_option("--k", query_args.k, "Number of predictions")->capture_default_str();
    query_cmd->add_flag("--exclude-known", query_args.exclude_known,
                        "Omit entities already linked to the query pair");
    query_cmd->add_option("--format", query_args.format, "Output format: table|json")->capture_default_str()
        ->check(CLI::IsMember({"table", "json"}));
    query_cmd->add_option("--explain", query_args.explain_rank,
                          "Print supporting triples for the prediction at this rank");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest_cmd) return cmd_ingest(ingest_args);
        if (*stats_cmd) return cmd_stats(stats_args);
        if (*split_cmd) return cmd_split(split_args);
        if (*train_cmd) return cmd_train(train_args);
        if (*eval_cmd) return cmd_eval(eval_args);
        if (*query_cmd) return cmd_query(query_args);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
