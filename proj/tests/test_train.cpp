#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "namekit/errors.hpp"
#include "namekit/model.hpp"
#include "namekit/parallel.hpp"
#include "namekit/specials.hpp"

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

struct Setup {
    Vocabulary vocab;
    EmbeddingMatrix emb;
    ModelParams params;
    std::vector<TrainExample> data;
};

Setup make_setup(std::uint64_t seed, bool use_copy, bool use_noncopy,
                 std::vector<ContextKind> contexts, std::size_t copies = 1) {
    Setup s;
    s.vocab = Vocabulary::build(
        {{"get", "size"}, {"get", "name"}, {"set", "name"}, {"count", "items"}, {"ctx"}}, 1);
    ModelConfig cfg;
    cfg.embed_dim = 3;
    cfg.hidden_dim = 4;
    cfg.l_max = 5;
    cfg.contexts = std::move(contexts);
    cfg.use_copy = use_copy;
    cfg.use_noncopy = use_noncopy;
    s.emb = random_embedding(s.vocab.size(), cfg.embed_dim, seed + 17);
    s.params = ModelParams::init(cfg, s.vocab.size(), seed);
    s.params.stats = build_bigram_stats({{"get", "size"}, {"get", "name"}, {"set", "name"}});

    std::vector<TrainExample> base;
    base.push_back({make_bundle(cfg.l_max, {"get", "size", "oov"}, {"set", "name"},
                                {"count", "items"}, {"widget"}),
                    {"get", "size", kEonToken}});
    base.push_back({make_bundle(cfg.l_max, {"count", "items", "ctx"}, {"get", "name"},
                                {"set"}, {"panel"}),
                    {"count", "items", kEonToken}});
    base.push_back({make_bundle(cfg.l_max, {"set", "name", "name"}, {}, {"get", "size"},
                                {"ctx"}),
                    {"set", "name", kEonToken}});
    base.push_back({make_bundle(cfg.l_max, {"oov", "get"}, {"ctx"}, {}, {"widget", "panel"}),
                    {"oov", kEonToken}});  // gold reachable only through copying
    for (std::size_t c = 0; c < copies; ++c) {
        for (const auto& ex : base) s.data.push_back(ex);
    }
    return s;
}

}  // namespace

TEST_CASE("analytic gradients match central differences across configurations") {
    struct Case {
        std::uint64_t seed;
        bool use_copy;
        bool use_noncopy;
        std::vector<ContextKind> contexts;
    };
    const std::vector<Case> cases = {
        {101, true, true, {ContextKind::Internal, ContextKind::Interaction, ContextKind::Sibling,
                           ContextKind::Enclosing}},
        {102, true, false, {ContextKind::Internal, ContextKind::Interaction, ContextKind::Sibling,
                            ContextKind::Enclosing}},
        {103, false, false, {ContextKind::Internal, ContextKind::Interaction,
                             ContextKind::Sibling, ContextKind::Enclosing}},
        {104, true, true, {ContextKind::Internal}},
        {105, true, true, {ContextKind::Internal, ContextKind::Enclosing}},
        {106, true, false, {ContextKind::Sibling, ContextKind::Enclosing}},
    };
    for (const auto& c : cases) {
        CAPTURE(c.seed);
        Setup s = make_setup(c.seed, c.use_copy, c.use_noncopy, c.contexts);
        for (std::size_t i = 0; i < 2; ++i) {
            GradCheckReport rep = grad_check(s.params, s.data[i], s.emb, s.vocab);
            CHECK(rep.max_rel_err < 1e-4);
            REQUIRE(rep.group_max_rel_err.count("context_weights") == 1);
            REQUIRE(rep.group_max_rel_err.count("theta_non") == 1);
            CHECK(rep.group_max_rel_err.at("context_weights") < 1e-4);
            CHECK(rep.group_max_rel_err.at("theta_non") < 1e-4);
        }
    }
}

TEST_CASE("gradient flows through a copied out-of-vocabulary target") {
    Setup s = make_setup(111, true, true,
                         {ContextKind::Internal, ContextKind::Interaction, ContextKind::Sibling,
                          ContextKind::Enclosing});
    GradCheckReport rep = grad_check(s.params, s.data[3], s.emb, s.vocab);
    CHECK(rep.max_rel_err < 1e-4);
    ModelGrads g = ModelGrads::zeros_like(s.params);
    example_loss_and_grad(s.params, s.data[3], s.emb, s.vocab, g);
    CHECK(g.w_copy.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("teacher forcing loss matches a manual replay") {
    Setup s = make_setup(121, true, true,
                         {ContextKind::Internal, ContextKind::Interaction, ContextKind::Sibling,
                          ContextKind::Enclosing});
    const TrainExample& ex = s.data[0];
    EncodedBundle enc = encode_bundle(s.params, ex.bundle, s.emb, s.vocab);
    DecodeState state = initial_state(s.params);
    double total = 0.0;
    for (const auto& gold : ex.target) {
        StepDistribution dist = decode_step(s.params, enc, state, s.emb, s.vocab);
        total += -std::log(dist.probs(static_cast<Eigen::Index>(enc.candidate_of(gold, s.vocab))) +
                           1e-12);
        state.prev_token = gold;
    }
    total /= static_cast<double>(ex.target.size());
    CHECK(example_loss(s.params, ex, s.emb, s.vocab) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("training reduces the loss and keeps the penalty weight negative") {
    Setup s = make_setup(131, true, true,
                         {ContextKind::Internal, ContextKind::Interaction, ContextKind::Sibling,
                          ContextKind::Enclosing});
    TrainConfig tc;
    tc.epochs = 80;
    tc.lr = 0.3;
    bool weight_ok = true;
    tc.on_epoch = [&](std::size_t, double loss, const ModelParams& p) {
        if (!(p.w_non() < 0.0) || !std::isfinite(loss)) weight_ok = false;
    };
    auto losses = train(s.params, s.data, s.emb, s.vocab, tc);
    REQUIRE(losses.size() == 80);
    CHECK(weight_ok);
    CHECK(losses.back() < losses.front());
    CHECK(losses.back() < 0.75 * losses.front());
}

TEST_CASE("training is bitwise deterministic and thread-count independent") {
    auto run = [](int threads) {
        set_max_threads(threads);
        Setup s = make_setup(141, true, true,
                             {ContextKind::Internal, ContextKind::Interaction,
                              ContextKind::Sibling, ContextKind::Enclosing},
                             5);  // 20 examples spread over several blocks
        TrainConfig tc;
        tc.epochs = 12;
        tc.lr = 0.2;
        auto losses = train(s.params, s.data, s.emb, s.vocab, tc);
        std::vector<double> flat;
        for (auto& span : tensor_spans(s.params)) {
            for (std::size_t i = 0; i < span.size; ++i) flat.push_back(span.data[i]);
        }
        set_max_threads(0);
        return std::make_pair(losses, flat);
    };
    auto serial = run(1);
    auto parallel = run(0);
    auto again = run(0);
    REQUIRE(serial.first.size() == parallel.first.size());
    for (std::size_t i = 0; i < serial.first.size(); ++i) {
        CHECK(serial.first[i] == parallel.first[i]);
    }
    REQUIRE(serial.second.size() == parallel.second.size());
    for (std::size_t i = 0; i < serial.second.size(); ++i) {
        CHECK(serial.second[i] == parallel.second[i]);
        CHECK(parallel.second[i] == again.second[i]);
    }
}

TEST_CASE("training validates its inputs") {
    Setup s = make_setup(151, true, true, {ContextKind::Internal});
    TrainConfig tc;
    CHECK_THROWS_AS(train(s.params, {}, s.emb, s.vocab, tc), DegenerateCorpus);

    TrainExample bad = s.data[0];
    bad.target = {"get", "size"};  // terminator missing
    CHECK_THROWS_AS(example_loss(s.params, bad, s.emb, s.vocab), EmptyName);
    bad.target = {};
    CHECK_THROWS_AS(example_loss(s.params, bad, s.emb, s.vocab), EmptyName);

    TrainConfig bad_tc;
    bad_tc.lr = 0.0;
    CHECK_THROWS_AS(train(s.params, s.data, s.emb, s.vocab, bad_tc), ConfigError);
}

TEST_CASE("non-finite parameters surface as a training error") {
    Setup s = make_setup(161, true, true, {ContextKind::Internal});
    s.params.w_gen(3, 0) = std::numeric_limits<double>::quiet_NaN();
    TrainConfig tc;
    tc.epochs = 3;
    CHECK_THROWS_AS(train(s.params, s.data, s.emb, s.vocab, tc), NonFiniteLoss);
}

TEST_CASE("a gold token with zero model probability keeps the loss finite") {
    Setup s = make_setup(171, true, true,
                         {ContextKind::Internal, ContextKind::Interaction, ContextKind::Sibling,
                          ContextKind::Enclosing});
    // strong penalty drives most combined scores negative without (usually)
    // blanking the whole distribution
    s.params.theta_non = 2.5;
    for (const auto& ex : s.data) {
        const double loss = example_loss(s.params, ex, s.emb, s.vocab);
        CHECK(std::isfinite(loss));
        CHECK(loss < 30.0);  // -log(1e-12) bounds a zero-probability step
        ModelGrads g = ModelGrads::zeros_like(s.params);
        example_loss_and_grad(s.params, ex, s.emb, s.vocab, g);
        for (auto& span : tensor_spans(g, s.params.cfg)) {
            for (std::size_t i = 0; i < span.size; ++i) {
                CHECK(std::isfinite(span.data[i]));
            }
        }
    }
}
