#include "namekit/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "namekit/errors.hpp"

namespace namekit {
namespace {

std::string fold_case(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::set<std::string> fold_set(const std::vector<std::string>& tokens) {
    std::set<std::string> out;
    for (const auto& t : tokens) out.insert(fold_case(t));
    return out;
}

}  // namespace

PairMetrics subtoken_metrics(const std::vector<std::string>& predicted,
                             const std::vector<std::string>& gold) {
    if (gold.empty()) {
        throw EmptyName("subtoken_metrics: gold name has no sub-tokens");
    }
    PairMetrics m;
    if (predicted.empty()) return m;

    const std::set<std::string> p = fold_set(predicted);
    const std::set<std::string> g = fold_set(gold);
    std::size_t hit = 0;
    for (const auto& t : p) {
        if (g.count(t)) ++hit;
    }
    m.precision = static_cast<double>(hit) / static_cast<double>(p.size());
    m.recall = static_cast<double>(hit) / static_cast<double>(g.size());
    if (m.precision + m.recall > 0.0) {
        m.f_score = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

bool exact_match(const std::vector<std::string>& predicted,
                 const std::vector<std::string>& gold) {
    if (predicted.size() != gold.size()) return false;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (fold_case(predicted[i]) != fold_case(gold[i])) return false;
    }
    return true;
}

SetMetrics set_metrics(const std::vector<NamePair>& pairs) {
    SetMetrics s;
    s.pairs = pairs.size();
    if (pairs.empty()) return s;
    for (const auto& pair : pairs) {
        const PairMetrics m = subtoken_metrics(pair.predicted, pair.gold);
        s.precision += m.precision;
        s.recall += m.recall;
        s.f_score += m.f_score;
        if (exact_match(pair.predicted, pair.gold)) s.exact_match_rate += 1.0;
    }
    const double n = static_cast<double>(pairs.size());
    s.precision /= n;
    s.recall /= n;
    s.f_score /= n;
    s.exact_match_rate /= n;
    return s;
}

ClassificationMetrics classification_metrics(const std::vector<ClassifiedCase>& cases) {
    ClassificationMetrics m;
    for (const auto& c : cases) {
        if (c.predicted_inconsistent && c.truly_inconsistent) ++m.tp;
        else if (c.predicted_inconsistent && !c.truly_inconsistent) ++m.fp;
        else if (!c.predicted_inconsistent && !c.truly_inconsistent) ++m.tn;
        else ++m.fn;
    }
    auto rate = [&m](std::size_t num, std::size_t den) {
        if (den == 0) {
            m.undefined_rates = true;
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.inconsistent_precision = rate(m.tp, m.tp + m.fp);
    m.inconsistent_recall = rate(m.tp, m.tp + m.fn);
    m.consistent_precision = rate(m.tn, m.tn + m.fn);
    m.consistent_recall = rate(m.tn, m.tn + m.fp);
    m.accuracy = rate(m.tp + m.tn, cases.size());
    return m;
}

std::vector<SizeBucket> accuracy_by_size(const std::vector<SizedOutcome>& outcomes) {
    struct Range {
        const char* label;
        std::size_t lo;
        std::size_t hi;
    };
    static const Range ranges[] = {
        {"1-5", 1, 5}, {"6-10", 6, 10}, {"11-25", 11, 25},
        {"26+", 26, static_cast<std::size_t>(-1)}};
    std::vector<SizeBucket> out;
    for (const auto& r : ranges) {
        SizeBucket b;
        b.label = r.label;
        for (const auto& o : outcomes) {
            if (o.size < r.lo || o.size > r.hi) continue;
            ++b.total;
            if (o.correct) ++b.correct;
        }
        if (b.total == 0) continue;
        b.accuracy = static_cast<double>(b.correct) / static_cast<double>(b.total);
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace namekit
