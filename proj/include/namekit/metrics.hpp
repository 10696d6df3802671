#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace namekit {

// Sub-token overlap between a predicted and a gold name, compared as
// case-insensitive sets.
struct PairMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;  // harmonic mean, 0 when precision + recall is 0
};

// Throws EmptyName when the gold name has no sub-tokens. An empty prediction
// scores zero across the board.
PairMetrics subtoken_metrics(const std::vector<std::string>& predicted,
                             const std::vector<std::string>& gold);

// ordered, case-insensitive sequence equality
bool exact_match(const std::vector<std::string>& predicted,
                 const std::vector<std::string>& gold);

struct NamePair {
    std::vector<std::string> predicted;
    std::vector<std::string> gold;
};

// Arithmetic means of the per-pair precision/recall/f-score, plus the exact
// match rate. The f-score is the mean of per-pair values, not recomputed from
// the mean precision and recall.
struct SetMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    double exact_match_rate = 0.0;
    std::size_t pairs = 0;
};

SetMetrics set_metrics(const std::vector<NamePair>& pairs);

// Consistency checking is scored with "inconsistent" as the positive class.
struct ClassificationMetrics {
    std::size_t tp = 0;  // flagged inconsistent, truly inconsistent
    std::size_t fp = 0;  // flagged inconsistent, actually consistent
    std::size_t tn = 0;
    std::size_t fn = 0;
    double inconsistent_precision = 0.0;
    double inconsistent_recall = 0.0;
    double consistent_precision = 0.0;
    double consistent_recall = 0.0;
    double accuracy = 0.0;
    bool undefined_rates = false;  // some denominator was zero; those rates are 0
};

struct ClassifiedCase {
    bool predicted_inconsistent = false;
    bool truly_inconsistent = false;
};

ClassificationMetrics classification_metrics(const std::vector<ClassifiedCase>& cases);

// Accuracy grouped by a size measure. Buckets without members are omitted.
struct SizeBucket {
    std::string label;
    std::size_t total = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
};

struct SizedOutcome {
    std::size_t size = 0;
    bool correct = false;
};

std::vector<SizeBucket> accuracy_by_size(const std::vector<SizedOutcome>& outcomes);

}  // namespace namekit
