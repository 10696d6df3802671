#include "namekit/pipeline.hpp"

#include <algorithm>

#include "namekit/cooccurrence.hpp"
#include "namekit/errors.hpp"
#include "namekit/glove.hpp"
#include "namekit/parallel.hpp"
#include "namekit/rng.hpp"
#include "namekit/specials.hpp"

namespace namekit {

namespace {

constexpr const char* kSkipEmptyName = "empty name";
constexpr const char* kSkipEmptyContext = "empty context";

std::vector<std::string> live_tokens(const TokenSeq& seq) {
    return {seq.tokens.begin(), seq.tokens.begin() + static_cast<long>(seq.true_length)};
}

bool any_active_context(const ContextBundle& bundle, const ModelConfig& cfg) {
    for (ContextKind kind : cfg.contexts) {
        if (bundle.get(kind).true_length > 0) return true;
    }
    return false;
}

}  // namespace

TrainSetup build_train_setup(const Corpus& corpus, const CallGraph& graph,
                             const RunConfig& cfg) {
    ContextBuilder builder(corpus, graph);

    // Bundles are built once; all four contexts feed the vocabulary even when
    // the model only encodes a subset, so ablation variants share embeddings.
    std::vector<ContextBundle> bundles(corpus.methods.size());
    parallel_for(corpus.methods.size(), [&](std::size_t i) {
        bundles[i] = builder.bundle(corpus.methods[i], cfg.mode, cfg.model.l_max);
    });

    std::vector<std::vector<std::string>> sequences;
    sequences.reserve(corpus.methods.size() * 5);
    for (std::size_t i = 0; i < corpus.methods.size(); ++i) {
        for (ContextKind kind : {ContextKind::Internal, ContextKind::Interaction,
                                 ContextKind::Sibling, ContextKind::Enclosing}) {
            auto tokens = live_tokens(bundles[i].get(kind));
            if (!tokens.empty()) sequences.push_back(std::move(tokens));
        }
        if (!corpus.methods[i].name_subtokens.empty())
            sequences.push_back(corpus.methods[i].name_subtokens);
    }

    TrainSetup setup;
    setup.vocab = Vocabulary::build(sequences, cfg.min_count);
    setup.embedding_sequences.reserve(sequences.size());
    for (const auto& seq : sequences) {
        setup.embedding_sequences.push_back(to_indices(seq, setup.vocab));
    }

    for (std::size_t i = 0; i < corpus.methods.size(); ++i) {
        const MethodRecord& m = corpus.methods[i];
        const char* reason = nullptr;
        if (m.name_subtokens.empty()) {
            reason = kSkipEmptyName;
        } else if (!any_active_context(bundles[i], cfg.model)) {
            reason = kSkipEmptyContext;
        }
        if (reason) {
            setup.skipped_ids.push_back(m.id);
            setup.skip_reasons.push_back(reason);
            continue;
        }
        TrainExample ex;
        ex.bundle = std::move(bundles[i]);
        ex.target = m.name_subtokens;
        ex.target.push_back(kEonToken);
        setup.examples.push_back(std::move(ex));
        setup.trained_ids.push_back(m.id);
    }
    return setup;
}

std::vector<CheckExample> build_check_examples(const ModelParams& model,
                                               const CheckerParams& checker,
                                               const std::vector<TrainExample>& examples,
                                               const EmbeddingMatrix& emb,
                                               const Vocabulary& vocab,
                                               std::size_t negatives_per_method,
                                               std::uint64_t seed) {
    std::vector<MethodRepresentation> reps(examples.size());
    parallel_for(examples.size(), [&](std::size_t i) {
        EncodedBundle enc = encode_bundle(model, examples[i].bundle, emb, vocab);
        reps[i] = represent_method(model, enc, emb, vocab);
    });

    // one stream of randomness, consumed in example order
    Rng rng(seed ^ 0x636865636b657221ULL);
    const std::size_t real_tokens = vocab.size() - 3;
    std::vector<CheckExample> out;
    out.reserve(examples.size() * (1 + negatives_per_method));
    for (std::size_t i = 0; i < examples.size(); ++i) {
        std::vector<std::string> gold(examples[i].target.begin(),
                                      examples[i].target.end() - 1);
        Eigen::MatrixXd current = pad_rows(reps[i].vectors, checker.length);

        CheckExample pos;
        pos.current = current;
        pos.name = pad_rows(embed_name(gold, emb, vocab), checker.length);
        pos.label = 0;
        out.push_back(std::move(pos));

        for (std::size_t k = 0; k < negatives_per_method; ++k) {
            const std::size_t pos_idx = rng.index(gold.size());
            std::string replacement;
            for (int attempt = 0; attempt < 50; ++attempt) {
                const std::string& cand = vocab.tokens[3 + rng.index(real_tokens)];
                if (cand != gold[pos_idx]) {
                    replacement = cand;
                    break;
                }
            }
            if (replacement.empty()) continue;  // vocabulary too uniform to corrupt
            std::vector<std::string> corrupted = gold;
            corrupted[pos_idx] = replacement;

            CheckExample neg;
            neg.current = current;
            neg.name = pad_rows(embed_name(corrupted, emb, vocab), checker.length);
            neg.label = 1;
            out.push_back(std::move(neg));
        }
    }
    return out;
}

TrainedArtifacts train_pipeline(const Corpus& corpus, const CallGraph& graph,
                                const RunConfig& cfg) {
    TrainSetup setup = build_train_setup(corpus, graph, cfg);
    if (setup.examples.empty()) {
        throw DegenerateCorpus("train_pipeline: no method has a usable name and context");
    }

    TrainedArtifacts art;
    art.vocab = std::move(setup.vocab);
    art.trained_ids = std::move(setup.trained_ids);
    art.skipped_ids = std::move(setup.skipped_ids);
    art.skip_reasons = std::move(setup.skip_reasons);

    // embeddings from context and name sequences alike, so every token the
    // decoder can emit has a learned vector to roll back through
    GloveConfig gcfg = cfg.glove;
    gcfg.dim = cfg.model.embed_dim;
    gcfg.seed = cfg.seed;
    CooccurrenceTable table = build_cooccurrence(setup.embedding_sequences, gcfg.window);
    art.emb = train_embeddings(table, art.vocab.size(), gcfg);

    // bigram statistics over the training names, after vocabulary filtering
    std::vector<std::vector<std::string>> names;
    for (const TrainExample& ex : setup.examples) {
        std::vector<std::string> kept;
        for (auto it = ex.target.begin(); it + 1 != ex.target.end(); ++it) {
            if (art.vocab.contains(*it)) kept.push_back(*it);
        }
        if (!kept.empty()) names.push_back(std::move(kept));
    }

    art.model = ModelParams::init(cfg.model, art.vocab.size(), cfg.seed);
    art.model.stats = build_bigram_stats(names);
    art.model.vocab_hash = art.vocab.hash();

    TrainConfig tc = cfg.train;
    tc.freeze_context_weights = cfg.equal_weights;
    art.model_losses = train(art.model, setup.examples, art.emb, art.vocab, tc);

    art.checker = CheckerParams::init(static_cast<int>(cfg.model.max_name_len),
                                      cfg.model.embed_dim, cfg.seed);
    std::vector<CheckExample> pairs =
        build_check_examples(art.model, art.checker, setup.examples, art.emb, art.vocab,
                             cfg.negatives_per_method, cfg.seed);
    art.checker_losses = train_checker(art.checker, pairs, cfg.checker);
    return art;
}

std::vector<CheckRecord> check_corpus(const Corpus& corpus, const CallGraph& graph,
                                      const TrainedArtifacts& art, const RunConfig& cfg) {
    ContextBuilder builder(corpus, graph);
    std::vector<CheckRecord> records(corpus.methods.size());
    parallel_for(corpus.methods.size(), [&](std::size_t i) {
        const MethodRecord& m = corpus.methods[i];
        CheckRecord& rec = records[i];
        rec.method_id = m.id;
        rec.existing_name = m.name;
        if (m.name_subtokens.empty()) {
            rec.skipped = true;
            rec.skip_reason = kSkipEmptyName;
            return;
        }
        ContextBundle bundle = builder.bundle(m, cfg.mode, cfg.model.l_max);
        if (!any_active_context(bundle, art.model.cfg)) {
            rec.skipped = true;
            rec.skip_reason = kSkipEmptyContext;
            return;
        }
        EncodedBundle enc = encode_bundle(art.model, bundle, art.emb, art.vocab);
        CheckResult res = check_consistency(art.model, art.checker, enc, m.name_subtokens,
                                            art.emb, art.vocab);
        rec.score = res.p_inconsistent;
        rec.inconsistent = res.inconsistent;
    });
    return records;
}

std::vector<SuggestRecord> suggest_corpus(const Corpus& corpus, const CallGraph& graph,
                                          const TrainedArtifacts& art, const RunConfig& cfg,
                                          std::size_t k) {
    ContextBuilder builder(corpus, graph);
    std::vector<SuggestRecord> records(corpus.methods.size());
    parallel_for(corpus.methods.size(), [&](std::size_t i) {
        const MethodRecord& m = corpus.methods[i];
        SuggestRecord& rec = records[i];
        rec.method_id = m.id;
        ContextBundle bundle = builder.bundle(m, cfg.mode, cfg.model.l_max);
        if (!any_active_context(bundle, art.model.cfg)) {
            rec.skipped = true;
            rec.skip_reason = kSkipEmptyContext;
            return;
        }
        EncodedBundle enc = encode_bundle(art.model, bundle, art.emb, art.vocab);
        rec.candidates = suggest_name(art.model, enc, art.emb, art.vocab, k);
    });
    return records;
}

}  // namespace namekit
