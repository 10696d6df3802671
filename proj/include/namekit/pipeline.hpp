#pragma once

#include <string>
#include <vector>

#include "namekit/callgraph.hpp"
#include "namekit/cnn.hpp"
#include "namekit/config.hpp"
#include "namekit/corpus.hpp"
#include "namekit/model.hpp"
#include "namekit/tasks.hpp"

namespace namekit {

// A method the decoder can learn from: the name splits into at least one
// sub-token and at least one active context is non-empty.
struct TrainSetup {
    Vocabulary vocab;
    std::vector<TrainExample> examples;              // aligned with trained_ids
    std::vector<std::string> trained_ids;
    std::vector<std::string> skipped_ids;            // and why, aligned
    std::vector<std::string> skip_reasons;
    // every non-empty context and name sequence, as vocabulary indices; the
    // sentences the embeddings are trained on
    std::vector<std::vector<std::size_t>> embedding_sequences;
};

// Vocabulary over every context sequence plus the name sub-tokens, then one
// training example per usable method. Contexts are cut to cfg.model.l_max.
TrainSetup build_train_setup(const Corpus& corpus, const CallGraph& graph,
                             const RunConfig& cfg);

struct TrainedArtifacts {
    Vocabulary vocab;
    EmbeddingMatrix emb;
    ModelParams model;
    CheckerParams checker;
    std::vector<double> model_losses;    // per epoch
    std::vector<double> checker_losses;  // per epoch
    std::vector<std::string> trained_ids;
    std::vector<std::string> skipped_ids;
    std::vector<std::string> skip_reasons;
};

// The whole training pass: vocabulary, co-occurrence + embeddings, bigram
// statistics, the sequence model, then the consistency checker on synthetic
// corrupted-name negatives. Deterministic for a fixed config.
TrainedArtifacts train_pipeline(const Corpus& corpus, const CallGraph& graph,
                                const RunConfig& cfg);

// Labelled channel pairs for checker training: each usable method yields one
// consistent pair (its own name) and cfg.negatives_per_method inconsistent
// pairs with a randomly substituted sub-token.
std::vector<CheckExample> build_check_examples(const ModelParams& model,
                                               const CheckerParams& checker,
                                               const std::vector<TrainExample>& examples,
                                               const EmbeddingMatrix& emb,
                                               const Vocabulary& vocab,
                                               std::size_t negatives_per_method,
                                               std::uint64_t seed);

// One verdict per corpus method, in corpus order. Methods that cannot be
// checked (no name sub-tokens, or every active context empty) come back
// flagged instead of scored.
struct CheckRecord {
    std::string method_id;
    std::string existing_name;
    double score = 0.0;
    bool inconsistent = false;
    bool skipped = false;
    std::string skip_reason;
};

std::vector<CheckRecord> check_corpus(const Corpus& corpus, const CallGraph& graph,
                                      const TrainedArtifacts& art, const RunConfig& cfg);

// Top-k suggestions per corpus method, in corpus order. A method with no
// usable context is flagged, not scored; k is capped by the beam width.
struct SuggestRecord {
    std::string method_id;
    std::vector<Suggestion> candidates;
    bool skipped = false;
    std::string skip_reason;
};

std::vector<SuggestRecord> suggest_corpus(const Corpus& corpus, const CallGraph& graph,
                                          const TrainedArtifacts& art, const RunConfig& cfg,
                                          std::size_t k);

}  // namespace namekit
