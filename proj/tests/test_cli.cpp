#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "namekit/ablation.hpp"
#include "namekit/callgraph.hpp"
#include "namekit/checkpoint.hpp"
#include "namekit/cli.hpp"
#include "namekit/config.hpp"
#include "namekit/corpus.hpp"
#include "namekit/errors.hpp"
#include "namekit/pipeline.hpp"
#include "namekit/rng.hpp"
#include "namekit/specials.hpp"

using namespace namekit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// A scratch directory that starts empty and is removed on destruction.
struct TempDir {
    fs::path path;
    explicit TempDir(const char* tag) {
        path = fs::temp_directory_path() / (std::string("namekit_test_") + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const char* leaf) const { return (path / leaf).string(); }
};

// run_cli prints summaries; keep test output readable.
int cli(std::vector<const char*> args) {
    args.insert(args.begin(), "namekit");
    std::ostringstream sink;
    std::streambuf* old = std::cout.rdbuf(sink.rdbuf());
    int code = run_cli(static_cast<int>(args.size()), args.data());
    std::cout.rdbuf(old);
    return code;
}

const char* kBoxJava = R"(
class Box {
    private int size;
    private String label;

    int getSize() { return size; }

    void setSize(int newSize) { size = newSize; }

    String getLabel() { return label; }

    int computeArea(int width, int height) {
        int area = width * height;
        return area;
    }
}
)";

const char* kPairJava = R"(
class Pair {
    private int first;
    private int second;

    int getFirst() { return first; }

    int getSecond() { return second; }

    int sumValues() {
        int total = getFirst() + getSecond();
        return total;
    }
}
)";

const char* kSmallCfg =
    "embed_dim = 8\n"
    "hidden_dim = 10\n"
    "l_max = 12\n"
    "max_name_len = 6\n"
    "beam_width = 3\n"
    "glove_epochs = 5\n"
    "train_epochs = 10\n"
    "checker_epochs = 5\n"
    "threads = 1\n";

Corpus tiny_corpus() {
    Corpus c;
    c.add(parse_source(kBoxJava, "Box.java"));
    c.add(parse_source(kPairJava, "Pair.java"));
    c.rebuild_index();
    return c;
}

RunConfig tiny_config() {
    RunConfig cfg = parse_config(kSmallCfg);
    cfg.train.epochs = 5;
    cfg.checker.epochs = 3;
    return cfg;
}

}  // namespace

TEST_CASE("config parses, validates and round-trips") {
    RunConfig cfg = parse_config(
        "# comment\n"
        "mode = checking\n"
        "seed = 9\n"
        "embed_dim = 24   # trailing comment\n"
        "contexts = internal, enclosing\n"
        "equal_weights = true\n");
    CHECK(cfg.mode == Mode::Checking);
    CHECK(cfg.seed == 9);
    CHECK(cfg.model.embed_dim == 24);
    CHECK(cfg.glove.dim == 24);
    CHECK(cfg.glove.seed == 9);
    CHECK(cfg.equal_weights);
    REQUIRE(cfg.model.contexts.size() == 2);
    CHECK(cfg.model.contexts[0] == ContextKind::Internal);
    CHECK(cfg.model.contexts[1] == ContextKind::Enclosing);

    // the echo parses back to the identical echo
    std::string text = config_to_text(cfg);
    CHECK(config_to_text(parse_config(text)) == text);
}

TEST_CASE("config rejects junk") {
    CHECK_THROWS_AS(parse_config("embedd_dim = 8\n"), ConfigError);        // unknown key
    CHECK_THROWS_AS(parse_config("seed = 1\nseed = 2\n"), ConfigError);    // duplicate
    CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);            // no '='
    CHECK_THROWS_AS(parse_config("embed_dim = eight\n"), ConfigError);     // bad number
    CHECK_THROWS_AS(parse_config("embed_dim = 0\n"), ConfigError);         // out of range
    CHECK_THROWS_AS(parse_config("mode = both\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("contexts = internal, internal\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("contexts =\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("max_name_len = 4\n"), ConfigError);      // checker needs 5
    CHECK_THROWS_AS(parse_config("glove_window = 41\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("train_momentum = 1\n"), ConfigError);
}

TEST_CASE("embedding checkpoint round-trips and guards its format") {
    TempDir tmp("emb_ckpt");
    Vocabulary vocab = Vocabulary::build({{"get", "size", "label", "area"}}, 1);
    Rng rng(5);
    EmbeddingMatrix emb;
    emb.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vocab.size()), 6);
    for (Eigen::Index i = 1; i < emb.rows.rows(); ++i)
        for (Eigen::Index j = 0; j < emb.rows.cols(); ++j) emb.rows(i, j) = rng.normal();

    std::string path = tmp / "e.nkemb";
    save_embedding(path, vocab, emb);
    EmbeddingCheckpoint back = load_embedding(path);
    CHECK(back.vocab.hash() == vocab.hash());
    CHECK(back.vocab.size() == vocab.size());
    CHECK(back.emb.rows == emb.rows);

    std::string bytes = slurp(path);
    spill(tmp / "trunc.nkemb", bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(load_embedding(tmp / "trunc.nkemb"), IoError);
    spill(tmp / "trail.nkemb", bytes + "x");
    CHECK_THROWS_AS(load_embedding(tmp / "trail.nkemb"), IoError);
    spill(tmp / "magic.nkemb", "NOTMAGIC" + bytes.substr(8));
    CHECK_THROWS_AS(load_embedding(tmp / "magic.nkemb"), IoError);
    CHECK_THROWS_AS(load_embedding(tmp / "absent.nkemb"), IoError);
}

TEST_CASE("model checkpoint restores every tensor and refuses a foreign vocabulary") {
    TempDir tmp("model_ckpt");
    Vocabulary vocab = Vocabulary::build({{"alpha", "beta", "gamma"}}, 1);
    ModelConfig mcfg;
    mcfg.embed_dim = 5;
    mcfg.hidden_dim = 7;
    mcfg.l_max = 6;
    mcfg.max_name_len = 5;
    mcfg.contexts = {ContextKind::Internal, ContextKind::Sibling};
    mcfg.use_noncopy = false;
    ModelParams params = ModelParams::init(mcfg, vocab.size(), 11);
    params.vocab_hash = vocab.hash();
    params.theta_non = -2.5;
    params.stats = build_bigram_stats({{"alpha", "beta"}, {"alpha", "gamma"}});

    std::string path = tmp / "m.nkmodel";
    save_model(path, params);
    ModelParams back = load_model(path, vocab.hash());
    CHECK(back.cfg.embed_dim == 5);
    CHECK(back.cfg.hidden_dim == 7);
    CHECK(back.cfg.contexts == mcfg.contexts);
    CHECK(back.cfg.use_noncopy == false);
    CHECK(back.theta_non == params.theta_non);
    CHECK(back.stats.unigram == params.stats.unigram);
    CHECK(back.stats.bigram == params.stats.bigram);
    auto a = tensor_spans(params);
    auto b = tensor_spans(back);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        REQUIRE(a[i].size == b[i].size);
        for (std::size_t k = 0; k < a[i].size; ++k) CHECK(a[i].data[k] == b[i].data[k]);
    }

    CHECK_THROWS_AS(load_model(path, vocab.hash() + 1), IoError);

    std::string bytes = slurp(path);
    spill(tmp / "trunc.nkmodel", bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(load_model(tmp / "trunc.nkmodel", vocab.hash()), IoError);
}

TEST_CASE("checker checkpoint round-trips") {
    TempDir tmp("cnn_ckpt");
    CheckerParams params = CheckerParams::init(6, 5, 3);
    std::string path = tmp / "c.nkcnn";
    save_checker(path, params);
    CheckerParams back = load_checker(path);
    CHECK(back.length == params.length);
    CHECK(back.k1 == params.k1);
    CHECK(back.b1 == params.b1);
    CHECK(back.k2 == params.k2);
    CHECK(back.b2 == params.b2);
    CHECK(back.wd == params.wd);
    CHECK(back.bd == params.bd);

    std::string bytes = slurp(path);
    spill(tmp / "magic.nkcnn", "WRONGMAG" + bytes.substr(8));
    CHECK_THROWS_AS(load_checker(tmp / "magic.nkcnn"), IoError);
}

TEST_CASE("build_train_setup separates usable methods from skips") {
    Corpus corpus = tiny_corpus();
    CallGraph graph = build_call_graph(corpus);
    RunConfig cfg = tiny_config();
    TrainSetup setup = build_train_setup(corpus, graph, cfg);

    CHECK(setup.examples.size() == corpus.methods.size());  // all nine usable here
    CHECK(setup.trained_ids.size() == setup.examples.size());
    CHECK(setup.skipped_ids.empty());
    CHECK(setup.vocab.contains("size"));
    CHECK(setup.vocab.contains("area"));
    // names feed the vocabulary too
    CHECK(setup.vocab.contains("sum"));
    for (const auto& ex : setup.examples) {
        REQUIRE(!ex.target.empty());
        CHECK(ex.target.back() == kEonToken);
    }
}

TEST_CASE("train_pipeline is deterministic and its records cover the corpus") {
    Corpus corpus = tiny_corpus();
    CallGraph graph = build_call_graph(corpus);
    RunConfig cfg = tiny_config();

    TrainedArtifacts a = train_pipeline(corpus, graph, cfg);
    TrainedArtifacts b = train_pipeline(corpus, graph, cfg);
    CHECK(a.model_losses == b.model_losses);
    CHECK(a.checker_losses == b.checker_losses);
    CHECK(a.emb.rows == b.emb.rows);
    REQUIRE(!a.model_losses.empty());
    for (double loss : a.model_losses) CHECK(std::isfinite(loss));

    auto verdicts = check_corpus(corpus, graph, a, cfg);
    REQUIRE(verdicts.size() == corpus.methods.size());
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        CHECK(verdicts[i].method_id == corpus.methods[i].id);
        if (!verdicts[i].skipped) {
            CHECK(verdicts[i].score >= 0.0);
            CHECK(verdicts[i].score <= 1.0);
        }
    }

    auto suggestions = suggest_corpus(corpus, graph, a, cfg, 2);
    REQUIRE(suggestions.size() == corpus.methods.size());
    for (const auto& s : suggestions) {
        if (s.skipped) continue;
        CHECK(!s.candidates.empty());
        CHECK(s.candidates.size() <= 2);
        for (const auto& c : s.candidates) CHECK(!c.rendered.empty());
    }
}

TEST_CASE("ablation grid trains every variant and reports comparable rows") {
    Corpus corpus = tiny_corpus();
    CallGraph graph = build_call_graph(corpus);
    RunConfig cfg = tiny_config();
    cfg.train.epochs = 3;

    std::vector<AblationVariant> grid = {
        {"internal", {ContextKind::Internal}, true, true, false},
        {"full", {ContextKind::Internal, ContextKind::Interaction, ContextKind::Sibling,
                  ContextKind::Enclosing},
         true, true, false},
    };
    AblationReport report = run_ablation(corpus, graph, cfg, grid);
    REQUIRE(report.rows.size() == 2);
    for (const auto& row : report.rows) {
        CHECK(row.methods == corpus.methods.size());
        CHECK(row.exact_match >= 0.0);
        CHECK(row.exact_match <= 1.0);
        CHECK(row.f_score >= 0.0);
    }
    CHECK(report.to_text().find("internal") != std::string::npos);
    auto parsed = nlohmann::ordered_json::parse(report.to_json());
    CHECK(parsed.size() == 2);
    CHECK(parsed[0]["variant"] == "internal");
}

TEST_CASE("figure fixtures reproduce their frozen context bundles") {
    const std::string root = NAMEKIT_FIXTURE_DIR;
    struct Golden {
        const char* dir;
        const char* method;
        Mode mode;
        const char* file;
    };
    const Golden goldens[] = {
        {"/fig1", "declareGrouping", Mode::Checking, "/fig1/declare_grouping.checking.json"},
        {"/fig2", "getPreferredSize", Mode::Suggestion,
         "/fig2/get_preferred_size.suggestion.json"},
        {"/fig2", "calculateFlowLayout", Mode::Checking,
         "/fig2/calculate_flow_layout.checking.json"},
    };
    for (const auto& g : goldens) {
        CAPTURE(g.file);
        Corpus corpus = ingest_directory(root + g.dir);
        CallGraph graph = build_call_graph(corpus);
        ContextBuilder builder(corpus, graph);
        bool found = false;
        for (const auto& m : corpus.methods) {
            if (m.name != g.method) continue;
            found = true;
            ContextBundle bundle = builder.bundle(m, g.mode, 64);
            CHECK(bundle_to_json(bundle) + "\n" == slurp(root + g.file));
        }
        CHECK(found);
    }
}

TEST_CASE("cli runs the whole task chain with stable outputs") {
    TempDir tmp("cli_chain");
    fs::create_directories(tmp.path / "src");
    spill(tmp / "src/Box.java", kBoxJava);
    spill(tmp / "src/Pair.java", kPairJava);
    spill(tmp / "run.cfg", kSmallCfg);
    std::string src = tmp / "src";
    std::string corpus = tmp / "corpus";
    std::string ckpt = tmp / "ckpt";
    std::string cfg = tmp / "run.cfg";

    REQUIRE(cli({"ingest", src.c_str(), "--out", corpus.c_str()}) == 0);
    CHECK(fs::exists(tmp.path / "corpus/methods.jsonl"));
    CHECK(fs::exists(tmp.path / "corpus/classes.jsonl"));
    CHECK(fs::exists(tmp.path / "corpus/callgraph.jsonl"));
    CHECK(fs::exists(tmp.path / "corpus/ingest_summary.txt"));

    // a rerun of ingest writes byte-identical files
    std::string corpus2 = tmp / "corpus2";
    REQUIRE(cli({"ingest", src.c_str(), "--out", corpus2.c_str()}) == 0);
    CHECK(slurp(tmp / "corpus/methods.jsonl") == slurp(tmp / "corpus2/methods.jsonl"));
    CHECK(slurp(tmp / "corpus/classes.jsonl") == slurp(tmp / "corpus2/classes.jsonl"));
    CHECK(slurp(tmp / "corpus/callgraph.jsonl") == slurp(tmp / "corpus2/callgraph.jsonl"));

    REQUIRE(cli({"train", corpus.c_str(), "--config", cfg.c_str(), "--out", ckpt.c_str(),
                 "--seed", "7"}) == 0);
    for (const char* f : {"embedding.nkemb", "model.nkmodel", "checker.nkcnn", "loss_log.txt",
                          "run_config.txt", "train_summary.txt"}) {
        CHECK(fs::exists(tmp.path / "ckpt" / f));
    }
    // the echoed config carries the overridden seed
    CHECK(slurp(tmp / "ckpt/run_config.txt").find("seed = 7") != std::string::npos);

    std::string verdicts = tmp / "verdicts.jsonl";
    REQUIRE(cli({"check", corpus.c_str(), "--checkpoints", ckpt.c_str(), "--config", cfg.c_str(),
                 "--out", verdicts.c_str()}) == 0);
    std::string verdicts2 = tmp / "verdicts2.jsonl";
    REQUIRE(cli({"check", corpus.c_str(), "--checkpoints", ckpt.c_str(), "--config", cfg.c_str(),
                 "--out", verdicts2.c_str()}) == 0);
    CHECK(slurp(verdicts) == slurp(verdicts2));

    std::string sugg = tmp / "suggestions.jsonl";
    REQUIRE(cli({"suggest", corpus.c_str(), "--checkpoints", ckpt.c_str(), "--config",
                 cfg.c_str(), "--k", "2", "--out", sugg.c_str()}) == 0);
    std::string sugg2 = tmp / "suggestions2.jsonl";
    REQUIRE(cli({"suggest", corpus.c_str(), "--checkpoints", ckpt.c_str(), "--config",
                 cfg.c_str(), "--k", "2", "--out", sugg2.c_str()}) == 0);
    CHECK(slurp(sugg) == slurp(sugg2));

    // one verdict and one suggestion line per corpus method
    std::istringstream vin(slurp(verdicts));
    std::size_t lines = 0;
    std::string line;
    while (std::getline(vin, line)) {
        auto j = nlohmann::ordered_json::parse(line);
        CHECK(j.contains("method_id"));
        CHECK(j.contains("score"));
        CHECK(j.contains("label"));
        ++lines;
    }
    CHECK(lines == 7);

    std::string methods = tmp / "corpus/methods.jsonl";
    std::string report = tmp / "eval.json";
    REQUIRE(cli({"eval", sugg.c_str(), methods.c_str(), "--out", report.c_str()}) == 0);
    auto rep = nlohmann::ordered_json::parse(slurp(report));
    CHECK(rep["mode"] == "suggestion");
    CHECK(rep["pairs"] == 7);
    CHECK(rep["exact_match"].is_number());
    CHECK(rep["by_size"].is_array());
}

TEST_CASE("cli maps failure classes to exit codes") {
    TempDir tmp("cli_codes");
    fs::create_directories(tmp.path / "empty");
    std::string empty = tmp / "empty";
    std::string out = tmp / "out";

    CHECK(cli({"--help"}) == 0);
    CHECK(cli({"frobnicate"}) == 2);                              // unknown command
    CHECK(cli({"ingest", empty.c_str(), "--out", out.c_str()}) == 2);  // no methods
    std::string missing = tmp / "missing";
    CHECK(cli({"ingest", missing.c_str(), "--out", out.c_str()}) == 2);

    spill(tmp / "bad.cfg", "embed_dim = -3\n");
    std::string bad = tmp / "bad.cfg";
    CHECK(cli({"train", empty.c_str(), "--config", bad.c_str(), "--out", out.c_str()}) == 2);

    // runtime failure: checkpoints that do not exist
    fs::create_directories(tmp.path / "src");
    spill(tmp / "src/Box.java", kBoxJava);
    std::string src = tmp / "src";
    std::string corpus = tmp / "corpus";
    REQUIRE(cli({"ingest", src.c_str(), "--out", corpus.c_str()}) == 0);
    std::string ghost = tmp / "ghost";
    CHECK(cli({"check", corpus.c_str(), "--checkpoints", ghost.c_str()}) == 1);
}
