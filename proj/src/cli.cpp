#include "namekit/cli.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "namekit/ablation.hpp"
#include "namekit/callgraph.hpp"
#include "namekit/checkpoint.hpp"
#include "namekit/config.hpp"
#include "namekit/corpus.hpp"
#include "namekit/errors.hpp"
#include "namekit/metrics.hpp"
#include "namekit/parallel.hpp"
#include "namekit/pipeline.hpp"
#include "namekit/splitter.hpp"

namespace namekit {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out = open_out(path);
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

// Options shared by the corpus-consuming subcommands. The config file is
// loaded first; explicit flags then override it.
struct CommonOpts {
    std::string config_path;
    std::string corpus_dir;    // positional
    std::string out;
    std::string checkpoints;
    std::string mode;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t k = 5;
};

void add_config_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "key = value configuration file");
    cmd->add_option("--seed", o.seed, "override the configured seed")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--mode", o.mode, "naming mode")
        ->check(CLI::IsMember({"checking", "suggestion"}));
}

RunConfig make_config(const CommonOpts& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.seed_set) cfg.seed = o.seed;
    if (o.mode == "checking") cfg.mode = Mode::Checking;
    if (o.mode == "suggestion") cfg.mode = Mode::Suggestion;
    if (!o.corpus_dir.empty()) cfg.corpus_dir = o.corpus_dir;
    if (!o.out.empty()) cfg.out_dir = o.out;
    cfg.glove.dim = cfg.model.embed_dim;
    cfg.glove.seed = cfg.seed;
    cfg.validate();
    set_max_threads(cfg.threads);
    return cfg;
}

Corpus load_corpus_dir(const std::string& dir) {
    if (dir.empty()) {
        throw ConfigError("no corpus directory; pass it as an argument or set corpus_dir");
    }
    return load_corpus(dir + "/methods.jsonl", dir + "/classes.jsonl");
}

// Checkpoints written by `train`, reloaded as one bundle. The model geometry
// comes from the checkpoint, not from the config file of this invocation.
TrainedArtifacts load_artifacts(const std::string& dir, RunConfig& cfg) {
    if (dir.empty()) {
        throw ConfigError("no checkpoint directory; pass --checkpoints or set out_dir");
    }
    TrainedArtifacts art;
    EmbeddingCheckpoint ec = load_embedding(dir + "/embedding.nkemb");
    art.vocab = std::move(ec.vocab);
    art.emb = std::move(ec.emb);
    art.model = load_model(dir + "/model.nkmodel", art.vocab.hash());
    art.checker = load_checker(dir + "/checker.nkcnn");
    cfg.model = art.model.cfg;
    return art;
}

void emit_lines(const std::vector<std::string>& lines, const std::string& out_path) {
    if (out_path.empty()) {
        for (const auto& line : lines) std::cout << line << "\n";
        return;
    }
    std::ofstream out = open_out(out_path);
    for (const auto& line : lines) out << line << "\n";
    if (!out) throw IoError("write to '" + out_path + "' failed");
}

int cmd_ingest(const std::string& root, const std::string& out_dir) {
    if (out_dir.empty()) throw ConfigError("ingest needs --out");
    IngestStats stats;
    Corpus corpus = ingest_directory(root, &stats);
    if (corpus.methods.empty()) {
        throw ConfigError("no methods found under '" + root + "'");
    }
    CallGraph graph = build_call_graph(corpus);

    fs::create_directories(out_dir);
    save_corpus(corpus, out_dir + "/methods.jsonl", out_dir + "/classes.jsonl");

    std::ofstream cg = open_out(out_dir + "/callgraph.jsonl");
    for (const auto& m : corpus.methods) {
        ordered_json j;
        j["method_id"] = m.id;
        j["callees"] = graph.callees_of(m.id);
        j["callers"] = graph.callers_of(m.id);
        cg << j.dump() << "\n";
    }
    if (!cg) throw IoError("write to '" + out_dir + "/callgraph.jsonl' failed");

    std::size_t edges = 0;
    for (const auto& [id, list] : graph.callees) edges += list.size();
    std::string summary;
    summary += "files " + std::to_string(stats.files) + "\n";
    summary += "classes " + std::to_string(stats.classes) + "\n";
    summary += "methods " + std::to_string(stats.methods) + "\n";
    summary += "call_edges " + std::to_string(edges) + "\n";
    summary += "unresolved_sites " + std::to_string(graph.unresolved_sites) + "\n";
    write_text(out_dir + "/ingest_summary.txt", summary);
    std::cout << summary;
    return 0;
}

int cmd_train(const CommonOpts& o) {
    RunConfig cfg = make_config(o);
    if (cfg.out_dir.empty()) throw ConfigError("train needs --out or out_dir");
    Corpus corpus = load_corpus_dir(cfg.corpus_dir);
    CallGraph graph = build_call_graph(corpus);

    TrainedArtifacts art = train_pipeline(corpus, graph, cfg);

    fs::create_directories(cfg.out_dir);
    save_embedding(cfg.out_dir + "/embedding.nkemb", art.vocab, art.emb);
    save_model(cfg.out_dir + "/model.nkmodel", art.model);
    save_checker(cfg.out_dir + "/checker.nkcnn", art.checker);

    std::string log;
    for (std::size_t e = 0; e < art.model_losses.size(); ++e) {
        log += "seq2seq " + std::to_string(e + 1) + " " + fmt_double(art.model_losses[e]) + "\n";
    }
    for (std::size_t e = 0; e < art.checker_losses.size(); ++e) {
        log += "checker " + std::to_string(e + 1) + " " + fmt_double(art.checker_losses[e]) + "\n";
    }
    write_text(cfg.out_dir + "/loss_log.txt", log);
    write_text(cfg.out_dir + "/run_config.txt", config_to_text(cfg));

    std::string summary;
    summary += "vocabulary " + std::to_string(art.vocab.size()) + "\n";
    summary += "trained " + std::to_string(art.trained_ids.size()) + "\n";
    summary += "skipped " + std::to_string(art.skipped_ids.size()) + "\n";
    for (std::size_t i = 0; i < art.skipped_ids.size(); ++i) {
        summary += "skip " + art.skipped_ids[i] + " (" + art.skip_reasons[i] + ")\n";
    }
    if (!art.model_losses.empty()) {
        summary += "seq2seq_final_loss " + fmt_double(art.model_losses.back()) + "\n";
    }
    if (!art.checker_losses.empty()) {
        summary += "checker_final_loss " + fmt_double(art.checker_losses.back()) + "\n";
    }
    write_text(cfg.out_dir + "/train_summary.txt", summary);
    std::cout << summary;
    return 0;
}

int cmd_check(const CommonOpts& o) {
    RunConfig cfg = make_config(o);
    Corpus corpus = load_corpus_dir(cfg.corpus_dir);
    CallGraph graph = build_call_graph(corpus);
    std::string ckpt = o.checkpoints.empty() ? cfg.out_dir : o.checkpoints;
    TrainedArtifacts art = load_artifacts(ckpt, cfg);

    std::vector<CheckRecord> records = check_corpus(corpus, graph, art, cfg);
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const auto& r : records) {
        ordered_json j;
        j["method_id"] = r.method_id;
        j["existing_name"] = r.existing_name;
        j["score"] = r.score;
        if (r.skipped) {
            j["label"] = "skipped";
            j["reason"] = r.skip_reason;
        } else {
            j["label"] = r.inconsistent ? "inconsistent" : "consistent";
        }
        lines.push_back(j.dump());
    }
    emit_lines(lines, o.out);
    return 0;
}

int cmd_suggest(const CommonOpts& o) {
    RunConfig cfg = make_config(o);
    Corpus corpus = load_corpus_dir(cfg.corpus_dir);
    CallGraph graph = build_call_graph(corpus);
    std::string ckpt = o.checkpoints.empty() ? cfg.out_dir : o.checkpoints;
    TrainedArtifacts art = load_artifacts(ckpt, cfg);

    std::vector<SuggestRecord> records = suggest_corpus(corpus, graph, art, cfg, o.k);
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const auto& r : records) {
        ordered_json j;
        j["method_id"] = r.method_id;
        ordered_json cands = ordered_json::array();
        for (const auto& c : r.candidates) {
            cands.push_back({{"name", c.rendered}, {"score", c.score}});
        }
        j["candidates"] = std::move(cands);
        if (r.skipped) j["reason"] = r.skip_reason;
        lines.push_back(j.dump());
    }
    emit_lines(lines, o.out);
    return 0;
}

std::vector<ordered_json> read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<ordered_json> lines;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw IoError(path + ":" + std::to_string(line_no) + ": not valid JSON");
        }
        lines.push_back(std::move(j));
    }
    return lines;
}

std::string record_id(const ordered_json& j) {
    if (j.contains("method_id")) return j.value("method_id", std::string());
    return j.value("id", std::string());
}

// Predicted name of one line: first suggestion candidate, or a bare "name".
std::string predicted_name(const ordered_json& j) {
    if (j.contains("candidates")) {
        const auto& c = j["candidates"];
        if (c.is_array() && !c.empty()) return c.front().value("name", std::string());
        return "";
    }
    return j.value("name", std::string());
}

std::vector<std::string> gold_subtokens(const ordered_json& j) {
    if (j.contains("name_subtokens")) {
        return j["name_subtokens"].get<std::vector<std::string>>();
    }
    return split_identifier(j.value("name", std::string()));
}

int cmd_eval(const CommonOpts& o, const std::string& pred_path, const std::string& gold_path) {
    RunConfig cfg = make_config(o);
    std::vector<ordered_json> pred_lines = read_jsonl(pred_path);
    std::vector<ordered_json> gold_lines = read_jsonl(gold_path);

    std::map<std::string, const ordered_json*> pred_by_id;
    for (const auto& j : pred_lines) pred_by_id[record_id(j)] = &j;

    ordered_json report;
    std::string text;
    if (cfg.mode == Mode::Suggestion) {
        // A gold method without a prediction, or with an empty candidate
        // list, counts as a miss rather than vanishing from the denominator.
        std::vector<NamePair> pairs;
        std::vector<SizedOutcome> sized;
        for (const auto& g : gold_lines) {
            NamePair pair;
            pair.gold = gold_subtokens(g);
            if (pair.gold.empty()) continue;
            auto it = pred_by_id.find(record_id(g));
            if (it != pred_by_id.end()) {
                pair.predicted = split_identifier(predicted_name(*it->second));
            }
            std::size_t size = g.value("line_count", 1);
            sized.push_back({size, exact_match(pair.predicted, pair.gold)});
            pairs.push_back(std::move(pair));
        }
        if (pairs.empty()) throw ConfigError("eval: no gold method has a usable name");
        SetMetrics m = set_metrics(pairs);
        std::vector<SizeBucket> buckets = accuracy_by_size(sized);

        report["mode"] = "suggestion";
        report["pairs"] = m.pairs;
        report["exact_match"] = m.exact_match_rate;
        report["precision"] = m.precision;
        report["recall"] = m.recall;
        report["f_score"] = m.f_score;
        ordered_json by_size = ordered_json::array();
        for (const auto& b : buckets) {
            by_size.push_back({{"bucket", b.label},
                               {"total", b.total},
                               {"correct", b.correct},
                               {"accuracy", b.accuracy}});
        }
        report["by_size"] = std::move(by_size);

        text += "pairs        " + std::to_string(m.pairs) + "\n";
        text += "exact_match  " + fixed3(m.exact_match_rate) + "\n";
        text += "precision    " + fixed3(m.precision) + "\n";
        text += "recall       " + fixed3(m.recall) + "\n";
        text += "f_score      " + fixed3(m.f_score) + "\n";
        for (const auto& b : buckets) {
            text += "size " + b.label;
            text.append(b.label.size() < 8 ? 8 - b.label.size() : 1, ' ');
            text += fixed3(b.accuracy) + " (" + std::to_string(b.correct) + "/" +
                    std::to_string(b.total) + ")\n";
        }
    } else {
        std::vector<ClassifiedCase> cases;
        std::size_t skipped = 0;
        for (const auto& g : gold_lines) {
            std::string gold_label = g.value("label", std::string());
            if (gold_label != "consistent" && gold_label != "inconsistent") continue;
            auto it = pred_by_id.find(record_id(g));
            std::string pred_label =
                it == pred_by_id.end() ? "" : it->second->value("label", std::string());
            if (pred_label != "consistent" && pred_label != "inconsistent") {
                ++skipped;
                continue;
            }
            cases.push_back({pred_label == "inconsistent", gold_label == "inconsistent"});
        }
        if (cases.empty()) throw ConfigError("eval: no method carries labels on both sides");
        ClassificationMetrics m = classification_metrics(cases);

        report["mode"] = "checking";
        report["cases"] = cases.size();
        report["skipped"] = skipped;
        report["tp"] = m.tp;
        report["fp"] = m.fp;
        report["tn"] = m.tn;
        report["fn"] = m.fn;
        report["inconsistent_precision"] = m.inconsistent_precision;
        report["inconsistent_recall"] = m.inconsistent_recall;
        report["consistent_precision"] = m.consistent_precision;
        report["consistent_recall"] = m.consistent_recall;
        report["accuracy"] = m.accuracy;

        text += "cases    " + std::to_string(cases.size()) + "\n";
        text += "skipped  " + std::to_string(skipped) + "\n";
        text += "tp " + std::to_string(m.tp) + "  fp " + std::to_string(m.fp) + "  tn " +
                std::to_string(m.tn) + "  fn " + std::to_string(m.fn) + "\n";
        text += "inconsistent_precision " + fixed3(m.inconsistent_precision) + "\n";
        text += "inconsistent_recall    " + fixed3(m.inconsistent_recall) + "\n";
        text += "consistent_precision   " + fixed3(m.consistent_precision) + "\n";
        text += "consistent_recall      " + fixed3(m.consistent_recall) + "\n";
        text += "accuracy               " + fixed3(m.accuracy) + "\n";
    }

    if (!o.out.empty()) write_text(o.out, report.dump(2) + "\n");
    std::cout << text;
    return 0;
}

int cmd_ablate(const CommonOpts& o) {
    RunConfig cfg = make_config(o);
    Corpus corpus = load_corpus_dir(cfg.corpus_dir);
    CallGraph graph = build_call_graph(corpus);
    AblationReport report = run_ablation(corpus, graph, cfg, default_ablation_grid());
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        write_text(o.out + "/ablation.txt", report.to_text());
        write_text(o.out + "/ablation.json", report.to_json() + "\n");
    }
    std::cout << report.to_text();
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"method name consistency checking and suggestion"};
    app.require_subcommand(1);

    std::string ingest_root;
    std::string ingest_out;
    CLI::App* ingest = app.add_subcommand("ingest", "parse sources into a corpus");
    ingest->add_option("root", ingest_root, "directory of .java sources")->required();
    ingest->add_option("--out", ingest_out, "corpus output directory")->required();

    CommonOpts train_o;
    CLI::App* train = app.add_subcommand("train", "train embeddings, model and checker");
    train->add_option("corpus", train_o.corpus_dir, "ingested corpus directory");
    train->add_option("--out", train_o.out, "checkpoint output directory");
    add_config_flags(train, train_o);

    CommonOpts check_o;
    CLI::App* check = app.add_subcommand("check", "score every method name for consistency");
    check->add_option("corpus", check_o.corpus_dir, "ingested corpus directory");
    check->add_option("--checkpoints", check_o.checkpoints, "directory written by train");
    check->add_option("--out", check_o.out, "verdict JSONL file (default stdout)");
    add_config_flags(check, check_o);

    CommonOpts suggest_o;
    CLI::App* suggest = app.add_subcommand("suggest", "propose names for every method");
    suggest->add_option("corpus", suggest_o.corpus_dir, "ingested corpus directory");
    suggest->add_option("--checkpoints", suggest_o.checkpoints, "directory written by train");
    suggest->add_option("--out", suggest_o.out, "suggestion JSONL file (default stdout)");
    suggest->add_option("--k", suggest_o.k, "candidates per method");
    add_config_flags(suggest, suggest_o);

    CommonOpts eval_o;
    std::string eval_pred;
    std::string eval_gold;
    CLI::App* eval = app.add_subcommand("eval", "score predictions against gold names");
    eval->add_option("predictions", eval_pred, "prediction JSONL file")->required();
    eval->add_option("gold", eval_gold, "gold JSONL file (corpus methods work)")->required();
    eval->add_option("--out", eval_o.out, "JSON report file");
    add_config_flags(eval, eval_o);

    CommonOpts ablate_o;
    CLI::App* ablate = app.add_subcommand("ablate", "compare context and switch variants");
    ablate->add_option("corpus", ablate_o.corpus_dir, "ingested corpus directory");
    ablate->add_option("--out", ablate_o.out, "report output directory");
    add_config_flags(ablate, ablate_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(ingest)) return cmd_ingest(ingest_root, ingest_out);
        if (app.got_subcommand(train)) return cmd_train(train_o);
        if (app.got_subcommand(check)) return cmd_check(check_o);
        if (app.got_subcommand(suggest)) return cmd_suggest(suggest_o);
        if (app.got_subcommand(eval)) return cmd_eval(eval_o, eval_pred, eval_gold);
        if (app.got_subcommand(ablate)) return cmd_ablate(ablate_o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace namekit
