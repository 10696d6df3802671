#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "namekit/bigram.hpp"
#include "namekit/cooccurrence.hpp"
#include "namekit/embedding.hpp"
#include "namekit/errors.hpp"
#include "namekit/glove.hpp"
#include "namekit/parallel.hpp"
#include "namekit/rng.hpp"

using namespace namekit;

namespace {

using Seqs = std::vector<std::vector<std::size_t>>;

Seqs random_corpus(Rng& rng, std::size_t n_seqs, std::size_t max_len,
                   std::size_t vocab) {
    Seqs seqs(n_seqs);
    for (auto& s : seqs) {
        std::size_t len = 1 + rng.index(max_len);
        for (std::size_t i = 0; i < len; ++i) s.push_back(1 + rng.index(vocab - 1));
    }
    return seqs;
}

}  // namespace

TEST_CASE("adjacent pair counts one per side") {
    CooccurrenceTable t = build_cooccurrence_serial({{3, 4}}, 1);
    CHECK(t.value(3, 4) == 1.0);
    CHECK(t.value(4, 3) == 1.0);
    CHECK(t.value(3, 3) == 0.0);
}

TEST_CASE("window-2 distances weight as reciprocals") {
    // [a, b, a]: a-b at distance 1 twice, a-a at distance 2 once.
    CooccurrenceTable t = build_cooccurrence_serial({{3, 4, 3}}, 2);
    CHECK(t.value(3, 4) == 2.0);
    CHECK(t.value(3, 3) == 0.5);
    CHECK(t.value(4, 4) == 0.0);
}

TEST_CASE("empty corpus gives empty table") {
    CHECK(build_cooccurrence_serial({}, 3).empty());
    CHECK(build_cooccurrence_serial({{}, {}}, 3).empty());
}

TEST_CASE("PAD positions never count") {
    CooccurrenceTable t = build_cooccurrence_serial({{3, 0, 4}}, 2);
    CHECK(t.value(3, 4) == 0.5);
    CHECK(t.value(0, 3) == 0.0);
    CHECK(t.value(0, 4) == 0.0);
}

TEST_CASE("table is exactly symmetric on random corpora") {
    Rng rng(7);
    for (int round = 0; round < 5; ++round) {
        Seqs seqs = random_corpus(rng, 20, 30, 12);
        CooccurrenceTable t = build_cooccurrence_serial(seqs, 4);
        for (std::size_t i = 1; i < 12; ++i)
            for (std::size_t j = 1; j < 12; ++j) CHECK(t.value(i, j) == t.value(j, i));
    }
}

TEST_CASE("parallel accumulation is bit-identical to serial") {
    Rng rng(11);
    Seqs seqs = random_corpus(rng, 200, 40, 30);
    CooccurrenceTable serial = build_cooccurrence_serial(seqs, 5);
    set_max_threads(4);
    CooccurrenceTable parallel = build_cooccurrence(seqs, 5);
    set_max_threads(0);
    REQUIRE(parallel.pair_count() == serial.pair_count());
    CHECK(parallel.cells() == serial.cells());
}

TEST_CASE("objective gradient matches central differences") {
    Rng rng(13);
    for (int round = 0; round < 3; ++round) {
        Seqs seqs = random_corpus(rng, 6, 10, 5);
        CooccurrenceTable table = build_cooccurrence_serial(seqs, 3);
        if (table.empty()) continue;

        GloveConfig cfg;
        cfg.dim = 3;
        const std::size_t n = 5;
        GloveParams p;
        p.w.resize(n, cfg.dim);
        p.w_tilde.resize(n, cfg.dim);
        p.b.resize(n);
        p.b_tilde.resize(n);
        for (std::size_t r = 0; r < n; ++r) {
            p.b(r) = rng.normal() * 0.3;
            p.b_tilde(r) = rng.normal() * 0.3;
            for (int c = 0; c < cfg.dim; ++c) {
                p.w(r, c) = rng.normal() * 0.3;
                p.w_tilde(r, c) = rng.normal() * 0.3;
            }
        }

        GloveParams g = glove_gradient(p, table, cfg);
        const double eps = 1e-5;
        double max_rel = 0.0;
        auto probe = [&](double* param, double analytic) {
            double keep = *param;
            *param = keep + eps;
            double plus = glove_objective(p, table, cfg);
            *param = keep - eps;
            double minus = glove_objective(p, table, cfg);
            *param = keep;
            double numeric = (plus - minus) / (2 * eps);
            double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
        };
        for (std::size_t r = 0; r < n; ++r) {
            probe(&p.b(r), g.b(r));
            probe(&p.b_tilde(r), g.b_tilde(r));
            for (int c = 0; c < cfg.dim; ++c) {
                probe(&p.w(r, c), g.w(r, c));
                probe(&p.w_tilde(r, c), g.w_tilde(r, c));
            }
        }
        CHECK(max_rel < 1e-6);
    }
}

TEST_CASE("single-pair training descends monotonically") {
    CooccurrenceTable t = build_cooccurrence_serial({{3, 4}}, 1);
    GloveConfig cfg;
    cfg.dim = 2;
    cfg.epochs = 500;
    cfg.lr = 0.02;
    cfg.seed = 5;
    std::vector<double> curve;
    EmbeddingMatrix emb = train_embeddings(t, 5, cfg, &curve);
    REQUIRE(curve.size() == 500);
    for (std::size_t e = 1; e < curve.size(); ++e) CHECK(curve[e] <= curve[e - 1]);
    CHECK(curve.back() < curve.front());
}

TEST_CASE("co-occurring cliques embed closer than strangers") {
    Seqs seqs;
    for (int k = 0; k < 40; ++k) {
        seqs.push_back({3, 4, 5});
        seqs.push_back({6, 7, 8});
    }
    GloveConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 120;
    cfg.seed = 9;
    EmbeddingMatrix emb =
        train_embeddings(build_cooccurrence_serial(seqs, 2), 9, cfg);

    auto cosine = [&](std::size_t a, std::size_t b) {
        return emb.rows.row(a).dot(emb.rows.row(b)) /
               (emb.rows.row(a).norm() * emb.rows.row(b).norm());
    };
    double within = (cosine(3, 4) + cosine(3, 5) + cosine(4, 5) + cosine(6, 7) +
                     cosine(6, 8) + cosine(7, 8)) /
                    6.0;
    double cross = 0.0;
    for (std::size_t a : {3, 4, 5})
        for (std::size_t b : {6, 7, 8}) cross += cosine(a, b);
    cross /= 9.0;
    CHECK(within > cross);
}

TEST_CASE("training is deterministic per seed and zeroes PAD") {
    Rng rng(21);
    Seqs seqs = random_corpus(rng, 10, 12, 8);
    CooccurrenceTable t = build_cooccurrence_serial(seqs, 3);
    GloveConfig cfg;
    cfg.dim = 4;
    cfg.epochs = 30;
    cfg.seed = 77;
    EmbeddingMatrix a = train_embeddings(t, 8, cfg);
    EmbeddingMatrix b = train_embeddings(t, 8, cfg);
    CHECK(a.rows == b.rows);
    CHECK(a.rows.row(0).isZero(0.0));
}

TEST_CASE("degenerate tables are rejected") {
    CHECK_THROWS_AS(train_embeddings(CooccurrenceTable(2), 5, GloveConfig{}),
                    DegenerateCorpus);
    // Only a diagonal cell: one distinct token.
    CooccurrenceTable t = build_cooccurrence_serial({{3, 3}}, 1);
    CHECK_THROWS_AS(train_embeddings(t, 5, GloveConfig{}), DegenerateCorpus);
}

TEST_CASE("embed_sequence maps PAD to zero and OOV to UNK") {
    Vocabulary v = Vocabulary::build({{"get", "size"}}, 1);
    EmbeddingMatrix emb;
    emb.rows.resize(v.size(), 3);
    for (std::size_t r = 0; r < v.size(); ++r)
        emb.rows.row(r) = Eigen::RowVector3d(static_cast<double>(r), 1.0, -1.0);
    emb.rows.row(0).setZero();

    TokenSeq seq;
    seq.tokens = {"get", "mystery", kPadToken, kPadToken};
    seq.true_length = 2;
    Eigen::MatrixXd m = embed_sequence(seq, emb, v);
    REQUIRE(m.rows() == 4);
    CHECK(m.row(0) == emb.rows.row(v.lookup("get")));
    CHECK(m.row(1) == emb.rows.row(kUnkIndex));
    CHECK(m.row(2).isZero(0.0));
    CHECK(m.row(3).isZero(0.0));
}

TEST_CASE("nearest_token is self-nearest with lowest-index ties") {
    EmbeddingMatrix emb;
    emb.rows.resize(6, 2);
    emb.rows << 0, 0,  // PAD
        0.2, 0.9,      // UNK
        -0.4, 0.1,     // EON
        1, 0,          // index 3
        0, 1,          // index 4
        -1, 0;         // index 5
    for (std::size_t i = 3; i < 6; ++i) {
        Eigen::VectorXd v = emb.rows.row(i).transpose();
        CHECK(nearest_token(v, emb) == i);
    }
    // Equidistant from rows 3 and 4: the lower index wins.
    Eigen::VectorXd mid(2);
    mid << 0.5, 0.5;
    CHECK(nearest_token(mid, emb) == 3);
    // Degenerate query still lands on the first non-special row.
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    CHECK(nearest_token(zero, emb) == 3);
}

TEST_CASE("nearest_token agrees with a brute-force scan") {
    Rng rng(31);
    EmbeddingMatrix emb;
    emb.rows.resize(20, 5);
    for (int r = 0; r < 20; ++r)
        for (int c = 0; c < 5; ++c) emb.rows(r, c) = rng.normal();
    for (int round = 0; round < 50; ++round) {
        Eigen::VectorXd v(5);
        for (int c = 0; c < 5; ++c) v(c) = rng.normal();
        std::size_t best = 3;
        double best_sim = -2.0;
        for (std::size_t i = 3; i < 20; ++i) {
            double sim = emb.rows.row(i).dot(v) / (emb.rows.row(i).norm() * v.norm());
            if (sim > best_sim) {
                best_sim = sim;
                best = i;
            }
        }
        CHECK(nearest_token(v, emb) == best);
    }
}

TEST_CASE("bigram counts match the worked example") {
    BigramStats stats = build_bigram_stats({{"get", "size"}, {"get", "name"}});
    CHECK(stats.count("get") == 2);
    CHECK(stats.count("size") == 1);
    CHECK(stats.count_pair("get", "size") == 1);
    CHECK(stats.count_pair("get", "name") == 1);
    CHECK(stats.count_pair("size", kEonToken) == 1);
    CHECK(stats.count_pair("name", kEonToken) == 1);
    CHECK(stats.count(kEonToken) == 0);
}

TEST_CASE("empty corpus gives empty stats") {
    BigramStats stats = build_bigram_stats({});
    CHECK(stats.empty());
    CHECK(stats.count("get") == 0);
}

TEST_CASE("bigram counting matches an independent recount") {
    Rng rng(41);
    const char* pool[] = {"get", "set", "name", "size", "max", "run"};
    std::vector<std::vector<std::string>> names;
    for (int n = 0; n < 200; ++n) {
        std::vector<std::string> name;
        std::size_t len = 1 + rng.index(4);
        for (std::size_t i = 0; i < len; ++i) name.push_back(pool[rng.index(6)]);
        names.push_back(name);
    }
    BigramStats stats = build_bigram_stats(names);

    std::map<std::string, std::uint64_t> uni;
    std::map<std::string, std::uint64_t> bi;
    for (const auto& name : names) {
        for (std::size_t i = 0; i < name.size(); ++i) {
            ++uni[name[i]];
            std::string next = i + 1 < name.size() ? name[i + 1] : kEonToken;
            ++bi[name[i] + "\x01" + next];
        }
    }
    for (const auto& [tok, n] : uni) CHECK(stats.count(tok) == n);
    std::uint64_t checked = 0;
    for (const auto& [key, n] : bi) {
        auto cut = key.find('\x01');
        CHECK(stats.count_pair(key.substr(0, cut), key.substr(cut + 1)) == n);
        ++checked;
    }
    CHECK(stats.bigram.size() == checked);
    // Bigram successors never exceed their unigram base.
    for (const auto& [pair, n] : stats.bigram) CHECK(n <= stats.count(pair.first));
}

TEST_CASE("vocabulary is frequency-ordered with reserved specials") {
    Vocabulary v = Vocabulary::build(
        {{"size", "get"}, {"get", "name"}, {"get"}}, 1);
    REQUIRE(v.size() == 6);
    CHECK(v.tokens[0] == kPadToken);
    CHECK(v.tokens[1] == kUnkToken);
    CHECK(v.tokens[2] == kEonToken);
    CHECK(v.tokens[3] == "get");   // freq 3
    CHECK(v.tokens[4] == "name");  // freq 1, tie broken by text
    CHECK(v.tokens[5] == "size");
    CHECK(v.lookup("get") == 3);
    CHECK(v.lookup("absent") == kUnkIndex);
    CHECK(v.in_dic_all("get"));
    CHECK(v.in_dic_all(kEonToken));
    CHECK_FALSE(v.in_dic_all(kUnkToken));
    CHECK_FALSE(v.in_dic_all("absent"));

    Vocabulary filtered = Vocabulary::build({{"aa", "aa", "bb"}}, 2);
    CHECK(filtered.contains("aa"));
    CHECK_FALSE(filtered.contains("bb"));
    CHECK_THROWS_AS(Vocabulary::build({{"zz"}}, 5), DegenerateCorpus);
    CHECK(v.hash() != filtered.hash());
    CHECK(v.hash() == Vocabulary::build({{"size", "get"}, {"get", "name"}, {"get"}}, 1).hash());
}
