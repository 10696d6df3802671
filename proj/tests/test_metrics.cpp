#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "namekit/errors.hpp"
#include "namekit/metrics.hpp"
#include "namekit/rng.hpp"

using namespace namekit;

namespace {
using Tokens = std::vector<std::string>;
}

TEST_CASE("pair metrics over sub-token sets") {
    struct Row {
        Tokens pred, gold;
        double p, r, f;
    };
    const std::vector<Row> table = {
        {{"get", "size"}, {"get", "size"}, 1.0, 1.0, 1.0},
        {{"get"}, {"get", "size"}, 1.0, 0.5, 2.0 / 3.0},
        {{"get", "length"}, {"get", "size"}, 0.5, 0.5, 0.5},
        {{"size", "get"}, {"get", "size"}, 1.0, 1.0, 1.0},  // order is ignored here
        {{"GET", "Size"}, {"get", "size"}, 1.0, 1.0, 1.0},
        {{"get", "get", "size"}, {"get", "size"}, 1.0, 1.0, 1.0},  // duplicates collapse
        {{"foo", "bar"}, {"get", "size"}, 0.0, 0.0, 0.0},
        {{"a", "b", "c", "d"}, {"a"}, 0.25, 1.0, 0.4},
        {{"x"}, {"x", "y", "z", "w"}, 1.0, 0.25, 0.4},
        {{}, {"get"}, 0.0, 0.0, 0.0},
    };
    for (const auto& row : table) {
        const PairMetrics m = subtoken_metrics(row.pred, row.gold);
        CHECK(m.precision == doctest::Approx(row.p).epsilon(1e-15));
        CHECK(m.recall == doctest::Approx(row.r).epsilon(1e-15));
        CHECK(m.f_score == doctest::Approx(row.f).epsilon(1e-15));
    }
    CHECK_THROWS_AS(subtoken_metrics({"get"}, {}), EmptyName);
}

TEST_CASE("exact match is ordered and case-insensitive") {
    CHECK(exact_match({"get", "size"}, {"get", "size"}));
    CHECK(exact_match({"Get", "SIZE"}, {"get", "size"}));
    CHECK_FALSE(exact_match({"size", "get"}, {"get", "size"}));
    CHECK_FALSE(exact_match({"get"}, {"get", "size"}));
    CHECK_FALSE(exact_match({}, {"get"}));
    CHECK(exact_match({}, {}));
}

TEST_CASE("set metrics average per-pair scores rather than recomputing") {
    std::vector<NamePair> pairs = {
        {{"get"}, {"get", "size"}},          // p 1.0, r 0.5, f 2/3
        {{"get", "size"}, {"get"}},          // p 0.5, r 1.0, f 2/3
    };
    const SetMetrics s = set_metrics(pairs);
    CHECK(s.pairs == 2);
    CHECK(s.precision == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(s.recall == doctest::Approx(0.75).epsilon(1e-15));
    // the harmonic mean of the aggregate precision/recall would be 0.75;
    // the mean of per-pair f-scores is 2/3
    CHECK(s.f_score == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(s.exact_match_rate == 0.0);

    const SetMetrics empty = set_metrics({});
    CHECK(empty.pairs == 0);
    CHECK(empty.precision == 0.0);
    CHECK(empty.f_score == 0.0);
}

TEST_CASE("set metrics agree with a naive recount on random pairs") {
    Rng rng(97);
    const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e", "f"};
    std::vector<NamePair> pairs;
    for (int i = 0; i < 500; ++i) {
        NamePair pair;
        const std::size_t np = rng.index(5);  // may be empty
        const std::size_t ng = 1 + rng.index(4);
        for (std::size_t j = 0; j < np; ++j) pair.predicted.push_back(alphabet[rng.index(6)]);
        for (std::size_t j = 0; j < ng; ++j) pair.gold.push_back(alphabet[rng.index(6)]);
        pairs.push_back(std::move(pair));
    }

    double sp = 0.0, sr = 0.0, sf = 0.0, sx = 0.0;
    for (const auto& pair : pairs) {
        std::set<std::string> ps(pair.predicted.begin(), pair.predicted.end());
        std::set<std::string> gs(pair.gold.begin(), pair.gold.end());
        std::size_t hit = 0;
        for (const auto& t : ps) hit += gs.count(t);
        const double p = ps.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(ps.size());
        const double r = gs.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(gs.size());
        sp += p;
        sr += r;
        sf += (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
        sx += pair.predicted == pair.gold ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(pairs.size());
    const SetMetrics s = set_metrics(pairs);
    CHECK(s.precision == sp / n);
    CHECK(s.recall == sr / n);
    CHECK(s.f_score == sf / n);
    CHECK(s.exact_match_rate == sx / n);
}

TEST_CASE("classification metrics for both classes") {
    std::vector<ClassifiedCase> cases;
    auto add = [&](bool pred, bool truth, std::size_t copies) {
        for (std::size_t i = 0; i < copies; ++i) cases.push_back({pred, truth});
    };
    add(true, true, 2);    // tp
    add(true, false, 1);   // fp
    add(false, false, 3);  // tn
    add(false, true, 1);   // fn

    const ClassificationMetrics m = classification_metrics(cases);
    CHECK(m.tp == 2);
    CHECK(m.fp == 1);
    CHECK(m.tn == 3);
    CHECK(m.fn == 1);
    CHECK(m.inconsistent_precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(m.inconsistent_recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(m.consistent_precision == doctest::Approx(3.0 / 4.0).epsilon(1e-15));
    CHECK(m.consistent_recall == doctest::Approx(3.0 / 4.0).epsilon(1e-15));
    CHECK(m.accuracy == doctest::Approx(5.0 / 7.0).epsilon(1e-15));
    CHECK_FALSE(m.undefined_rates);
}

TEST_CASE("classification metrics flag undefined rates instead of dividing by zero") {
    // the checker never flags anything: no positive predictions exist
    std::vector<ClassifiedCase> cases = {{false, false}, {false, true}};
    const ClassificationMetrics m = classification_metrics(cases);
    CHECK(m.inconsistent_precision == 0.0);
    CHECK(m.undefined_rates);
    CHECK(m.accuracy == 0.5);

    const ClassificationMetrics none = classification_metrics({});
    CHECK(none.accuracy == 0.0);
    CHECK(none.undefined_rates);
}

TEST_CASE("accuracy by size buckets omits empty ranges") {
    std::vector<SizedOutcome> outcomes = {
        {1, true}, {5, false},   // 1-5
        {6, true},               // 6-10
        {30, true}, {26, false}  // 26+
    };
    const auto buckets = accuracy_by_size(outcomes);
    REQUIRE(buckets.size() == 3);
    CHECK(buckets[0].label == "1-5");
    CHECK(buckets[0].total == 2);
    CHECK(buckets[0].correct == 1);
    CHECK(buckets[0].accuracy == 0.5);
    CHECK(buckets[1].label == "6-10");
    CHECK(buckets[1].accuracy == 1.0);
    CHECK(buckets[2].label == "26+");
    CHECK(buckets[2].total == 2);
    CHECK(buckets[2].accuracy == 0.5);

    CHECK(accuracy_by_size({}).empty());
    // boundary sizes land in the lower bucket's upper edge
    const auto edge = accuracy_by_size({{10, true}, {11, true}, {25, true}});
    REQUIRE(edge.size() == 2);
    CHECK(edge[0].label == "6-10");
    CHECK(edge[0].total == 1);
    CHECK(edge[1].label == "11-25");
    CHECK(edge[1].total == 2);
}
