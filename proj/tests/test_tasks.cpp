#include <string>
#include <vector>

#include <doctest.h>

#include "namekit/errors.hpp"
#include "namekit/specials.hpp"
#include "namekit/splitter.hpp"
#include "namekit/tasks.hpp"

using namespace namekit;

namespace {

TokenSeq make_seq(std::vector<std::string> tokens, std::size_t l_max) {
    TokenSeq s;
    s.tokens = std::move(tokens);
    s.true_length = s.tokens.size();
    return pad_truncate(std::move(s), l_max);
}

ContextBundle make_bundle(std::size_t l_max, std::vector<std::string> internal,
                          std::vector<std::string> interaction,
                          std::vector<std::string> sibling,
                          std::vector<std::string> enclosing) {
    ContextBundle b;
    b.method_id = "fixture";
    b.mode = Mode::Suggestion;
    b.internal = make_seq(std::move(internal), l_max);
    b.interaction = make_seq(std::move(interaction), l_max);
    b.sibling = make_seq(std::move(sibling), l_max);
    b.enclosing = make_seq(std::move(enclosing), l_max);
    return b;
}

EmbeddingMatrix random_embedding(std::size_t vocab, int dim, std::uint64_t seed) {
    EmbeddingMatrix emb;
    emb.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vocab), dim);
    Rng rng(seed);
    for (Eigen::Index i = 1; i < emb.rows.rows(); ++i) {
        for (int j = 0; j < dim; ++j) emb.rows(i, j) = rng.uniform(-0.5, 0.5);
    }
    return emb;
}

struct Fixture {
    Vocabulary vocab;
    EmbeddingMatrix emb;
    ModelParams params;
    ContextBundle bundle;
};

Fixture make_fixture(std::uint64_t seed) {
    Fixture f;
    f.vocab = Vocabulary::build(
        {{"get", "size"}, {"get", "name"}, {"set", "name"}, {"count", "items"}, {"ctx"}}, 1);
    ModelConfig cfg;
    cfg.embed_dim = 3;
    cfg.hidden_dim = 4;
    cfg.l_max = 5;
    cfg.max_name_len = 4;
    cfg.beam_width = 6;
    f.emb = random_embedding(f.vocab.size(), cfg.embed_dim, seed + 17);
    f.params = ModelParams::init(cfg, f.vocab.size(), seed);
    f.params.stats = build_bigram_stats({{"get", "size"}, {"get", "name"}, {"set", "name"}});
    f.bundle = make_bundle(cfg.l_max, {"get", "size", "oov", "get"}, {"set", "name", "ctx"},
                           {"count", "items"}, {"widget"});
    return f;
}

}  // namespace

TEST_CASE("method representation mirrors greedy decoding") {
    Fixture f = make_fixture(201);
    EncodedBundle enc = encode_bundle(f.params, f.bundle, f.emb, f.vocab);
    MethodRepresentation rep = represent_method(f.params, enc, f.emb, f.vocab);
    auto greedy = greedy_decode(f.params, enc, f.emb, f.vocab, f.params.cfg.max_name_len);

    CHECK(rep.tokens == greedy);
    REQUIRE(rep.vectors.rows() == static_cast<Eigen::Index>(rep.tokens.size()));
    CHECK(rep.tokens.size() <= f.params.cfg.max_name_len);
    for (std::size_t i = 0; i < rep.tokens.size(); ++i) {
        const std::size_t id = f.vocab.lookup(rep.tokens[i]);
        const std::size_t row = (id == kUnkIndex && rep.tokens[i] != kUnkToken) ? kUnkIndex : id;
        CHECK((rep.vectors.row(static_cast<Eigen::Index>(i)) -
               f.emb.rows.row(static_cast<Eigen::Index>(row)))
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
    CHECK_FALSE(rep.empty);
}

TEST_CASE("an immediate terminator yields an empty flagged representation") {
    Fixture f = make_fixture(202);
    f.params.b_gen(kEonIndex) = 50.0;  // generation mass collapses onto the terminator
    EncodedBundle enc = encode_bundle(f.params, f.bundle, f.emb, f.vocab);
    MethodRepresentation rep = represent_method(f.params, enc, f.emb, f.vocab);
    CHECK(rep.empty);
    CHECK(rep.tokens.empty());
    CHECK(rep.vectors.rows() == 0);
}

TEST_CASE("consistency check pairs the reconstruction with the name") {
    Fixture f = make_fixture(203);
    CheckerParams checker = CheckerParams::init(8, f.params.cfg.embed_dim, 99);
    EncodedBundle enc = encode_bundle(f.params, f.bundle, f.emb, f.vocab);

    CheckResult a = check_consistency(f.params, checker, enc, {"get", "size"}, f.emb, f.vocab);
    CheckResult b = check_consistency(f.params, checker, enc, {"get", "size"}, f.emb, f.vocab);
    CHECK(a.p_inconsistent == b.p_inconsistent);
    CHECK(a.p_inconsistent > 0.0);
    CHECK(a.p_inconsistent < 1.0);
    CHECK(a.inconsistent == (a.p_inconsistent > 0.5));

    // names longer than the checker window are truncated, not rejected
    std::vector<std::string> long_name(20, "get");
    CHECK_NOTHROW(check_consistency(f.params, checker, enc, long_name, f.emb, f.vocab));

    CHECK_THROWS_AS(check_consistency(f.params, checker, enc, {}, f.emb, f.vocab), EmptyName);
}

TEST_CASE("suggestions slice one beam so smaller k gives a prefix") {
    Fixture f = make_fixture(204);
    EncodedBundle enc = encode_bundle(f.params, f.bundle, f.emb, f.vocab);
    auto one = suggest_name(f.params, enc, f.emb, f.vocab, 1);
    auto three = suggest_name(f.params, enc, f.emb, f.vocab, 3);
    auto many = suggest_name(f.params, enc, f.emb, f.vocab, 50);

    REQUIRE(one.size() == 1);
    REQUIRE(three.size() >= 1);
    CHECK(one[0].tokens == three[0].tokens);
    for (std::size_t i = 0; i < three.size(); ++i) {
        CHECK(three[i].tokens == many[i].tokens);
    }
    CHECK(many.size() <= f.params.cfg.beam_width);

    for (std::size_t i = 0; i < many.size(); ++i) {
        CHECK_FALSE(many[i].tokens.empty());
        CHECK(many[i].rendered == recompose_camel(many[i].tokens));
        if (i > 0) CHECK(many[i - 1].score >= many[i].score);
        for (const auto& tok : many[i].tokens) {
            // every suggested token is a real word: either from the
            // vocabulary or copied verbatim from the method's contexts
            const bool in_vocab = f.vocab.contains(tok) && f.vocab.lookup(tok) >= 3;
            const bool from_input = enc.extended_index.count(tok) > 0;
            CHECK((in_vocab || from_input));
        }
    }
}

TEST_CASE("suggested vocabulary tokens roll back to themselves") {
    Fixture f = make_fixture(205);
    EncodedBundle enc = encode_bundle(f.params, f.bundle, f.emb, f.vocab);
    auto beams = beam_decode(f.params, enc, f.emb, f.vocab, f.params.cfg.beam_width,
                             f.params.cfg.max_name_len);
    auto suggestions = suggest_name(f.params, enc, f.emb, f.vocab, f.params.cfg.beam_width);

    std::size_t si = 0;
    for (const auto& hyp : beams) {
        if (hyp.tokens.empty()) continue;
        REQUIRE(si < suggestions.size());
        // random embedding rows are distinct, so the nearest row of a
        // vocabulary token's own vector is that token
        CHECK(suggestions[si].tokens == hyp.tokens);
        ++si;
    }
}

TEST_CASE("a placeholder emission is rolled back to a concrete token") {
    Fixture f = make_fixture(206);
    f.params.b_gen(kUnkIndex) = 8.0;  // placeholder dominates the first steps
    EncodedBundle enc = encode_bundle(f.params, f.bundle, f.emb, f.vocab);
    auto suggestions = suggest_name(f.params, enc, f.emb, f.vocab, 3);
    REQUIRE(!suggestions.empty());
    for (const auto& s : suggestions) {
        for (const auto& tok : s.tokens) {
            CHECK(tok != kUnkToken);
            CHECK(tok != kPadToken);
            CHECK(tok != kEonToken);
        }
    }
}

TEST_CASE("copied out-of-vocabulary tokens survive verbatim") {
    Fixture f = make_fixture(207);
    // make copying overwhelming and generation eager to stop
    f.params.context_weights = Eigen::VectorXd::Constant(4, 4.0);
    f.params.b_gen(kEonIndex) = 4.0;
    f.bundle = make_bundle(f.params.cfg.l_max, {"zzz", "zzz", "zzz"}, {"zzz"}, {"zzz"}, {"zzz"});
    EncodedBundle enc = encode_bundle(f.params, f.bundle, f.emb, f.vocab);
    auto suggestions = suggest_name(f.params, enc, f.emb, f.vocab, 6);
    REQUIRE(!suggestions.empty());
    bool saw_verbatim = false;
    for (const auto& s : suggestions) {
        for (const auto& tok : s.tokens) {
            if (tok == "zzz") saw_verbatim = true;
        }
    }
    CHECK(saw_verbatim);
}
