#include "namekit/ablation.hpp"

#include <cstdio>

#include <json.hpp>

#include "namekit/cooccurrence.hpp"
#include "namekit/errors.hpp"
#include "namekit/glove.hpp"
#include "namekit/metrics.hpp"
#include "namekit/parallel.hpp"
#include "namekit/pipeline.hpp"

namespace namekit {

namespace {

const std::vector<ContextKind> kAllContexts = {ContextKind::Internal, ContextKind::Interaction,
                                               ContextKind::Sibling, ContextKind::Enclosing};

bool encodable(const ContextBundle& bundle, const std::vector<ContextKind>& contexts) {
    for (ContextKind kind : contexts) {
        if (bundle.get(kind).true_length > 0) return true;
    }
    return false;
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

std::vector<AblationVariant> default_ablation_grid() {
    std::vector<AblationVariant> grid;
    for (ContextKind kind : kAllContexts) {
        grid.push_back({context_name(kind), {kind}, true, true, false});
    }
    grid.push_back({"full", kAllContexts, true, true, false});
    grid.push_back({"full-no-copy", kAllContexts, false, true, false});
    grid.push_back({"full-no-noncopy", kAllContexts, true, false, false});
    grid.push_back({"full-equal-weights", kAllContexts, true, true, true});
    return grid;
}

AblationReport run_ablation(const Corpus& corpus, const CallGraph& graph,
                            const RunConfig& base, const std::vector<AblationVariant>& grid) {
    if (grid.empty()) throw ConfigError("run_ablation: the variant grid is empty");

    // One vocabulary and embedding table for every variant: the bundles carry
    // all four contexts no matter which subset a variant encodes.
    TrainSetup setup = build_train_setup(corpus, graph, base);
    if (setup.examples.empty()) {
        throw DegenerateCorpus("run_ablation: no method has a usable name and context");
    }
    GloveConfig gcfg = base.glove;
    gcfg.dim = base.model.embed_dim;
    gcfg.seed = base.seed;
    CooccurrenceTable table = build_cooccurrence(setup.embedding_sequences, gcfg.window);
    EmbeddingMatrix emb = train_embeddings(table, setup.vocab.size(), gcfg);

    std::vector<std::vector<std::string>> names;
    for (const TrainExample& ex : setup.examples) {
        std::vector<std::string> kept;
        for (auto it = ex.target.begin(); it + 1 != ex.target.end(); ++it) {
            if (setup.vocab.contains(*it)) kept.push_back(*it);
        }
        if (!kept.empty()) names.push_back(std::move(kept));
    }
    BigramStats stats = build_bigram_stats(names);

    AblationReport report;
    for (const AblationVariant& variant : grid) {
        ModelConfig mcfg = base.model;
        mcfg.contexts = variant.contexts;
        mcfg.use_copy = variant.use_copy;
        mcfg.use_noncopy = variant.use_noncopy;

        std::vector<TrainExample> usable;
        for (const TrainExample& ex : setup.examples) {
            if (encodable(ex.bundle, mcfg.contexts)) usable.push_back(ex);
        }

        AblationRow row;
        row.variant = variant.name;
        row.methods = setup.examples.size();
        if (!usable.empty()) {
            ModelParams model = ModelParams::init(mcfg, setup.vocab.size(), base.seed);
            model.stats = stats;
            model.vocab_hash = setup.vocab.hash();
            TrainConfig tc = base.train;
            tc.freeze_context_weights = variant.equal_weights;
            std::vector<double> losses = train(model, usable, emb, setup.vocab, tc);
            row.final_loss = losses.back();

            // top-1 suggestion per method; a method this variant cannot encode
            // scores zero so rows stay comparable
            std::vector<NamePair> pairs(setup.examples.size());
            parallel_for(setup.examples.size(), [&](std::size_t i) {
                const TrainExample& ex = setup.examples[i];
                pairs[i].gold.assign(ex.target.begin(), ex.target.end() - 1);
                if (!encodable(ex.bundle, mcfg.contexts)) return;
                EncodedBundle enc = encode_bundle(model, ex.bundle, emb, setup.vocab);
                auto suggestions = suggest_name(model, enc, emb, setup.vocab, 1);
                if (!suggestions.empty()) pairs[i].predicted = suggestions[0].tokens;
            });
            SetMetrics m = set_metrics(pairs);
            row.exact_match = m.exact_match_rate;
            row.precision = m.precision;
            row.recall = m.recall;
            row.f_score = m.f_score;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string AblationReport::to_text() const {
    std::size_t name_w = 7;
    for (const auto& row : rows) name_w = std::max(name_w, row.variant.size());

    std::string out;
    auto pad = [&](const std::string& s, std::size_t w) {
        out += s;
        out.append(w > s.size() ? w - s.size() : 0, ' ');
    };
    pad("variant", name_w + 2);
    out += "methods  exmatch  precision  recall  f_score  final_loss\n";
    for (const auto& row : rows) {
        pad(row.variant, name_w + 2);
        pad(std::to_string(row.methods), 9);
        pad(fixed3(row.exact_match), 9);
        pad(fixed3(row.precision), 11);
        pad(fixed3(row.recall), 8);
        pad(fixed3(row.f_score), 9);
        out += fixed3(row.final_loss);
        out += "\n";
    }
    return out;
}

std::string AblationReport::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json j;
        j["variant"] = row.variant;
        j["methods"] = row.methods;
        j["exact_match"] = row.exact_match;
        j["precision"] = row.precision;
        j["recall"] = row.recall;
        j["f_score"] = row.f_score;
        j["final_loss"] = row.final_loss;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

}  // namespace namekit
