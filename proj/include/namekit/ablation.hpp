#pragma once

#include <string>
#include <vector>

#include "namekit/callgraph.hpp"
#include "namekit/config.hpp"
#include "namekit/corpus.hpp"

namespace namekit {

// One model variant in a switch grid: which contexts it encodes and which of
// the scoring pathways stay on.
struct AblationVariant {
    std::string name;
    std::vector<ContextKind> contexts;
    bool use_copy = true;
    bool use_noncopy = true;
    bool equal_weights = false;
};

// Each single context, the full set, and the full set with one switch off.
std::vector<AblationVariant> default_ablation_grid();

struct AblationRow {
    std::string variant;
    double exact_match = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    double final_loss = 0.0;
    std::size_t methods = 0;
};

struct AblationReport {
    std::vector<AblationRow> rows;

    std::string to_text() const;  // aligned columns
    std::string to_json() const;
};

// Trains every variant on the corpus and scores its top-1 suggestions against
// the existing names of the same methods. Variants share one vocabulary and
// embedding table; only the sequence model is retrained. Deterministic for a
// fixed config.
AblationReport run_ablation(const Corpus& corpus, const CallGraph& graph,
                            const RunConfig& base, const std::vector<AblationVariant>& grid);

}  // namespace namekit
