#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "namekit/attention.hpp"
#include "namekit/bigram.hpp"
#include "namekit/context.hpp"
#include "namekit/embedding.hpp"
#include "namekit/gru.hpp"
#include "namekit/vocab.hpp"

namespace namekit {

struct ModelConfig {
    int embed_dim = 32;
    int hidden_dim = 64;
    std::size_t l_max = 64;
    std::size_t max_name_len = 8;  // emitted sub-tokens before the terminator is forced
    std::size_t beam_width = 10;
    std::vector<ContextKind> contexts = {ContextKind::Internal, ContextKind::Interaction,
                                         ContextKind::Sibling, ContextKind::Enclosing};
    bool use_copy = true;
    bool use_noncopy = true;
    double init_scale = 0.08;
    double theta_non_init = -4.0;
};

struct ModelParams {
    ModelConfig cfg;
    std::vector<GruParams> encoders;  // parallel to cfg.contexts
    GruParams decoder;                // input = [attention context; previous-token embedding]
    AttentionParams attention;
    Eigen::MatrixXd w_gen;            // vocab x hidden
    Eigen::VectorXd b_gen;            // vocab
    Eigen::MatrixXd w_copy;           // hidden x hidden
    Eigen::VectorXd context_weights;  // one per active context
    double theta_non = -4.0;
    BigramStats stats;
    std::uint64_t vocab_hash = 0;

    // combination weight of the non-copy penalty; negative by construction
    double w_non() const;
    std::size_t vocab_size() const { return static_cast<std::size_t>(w_gen.rows()); }

    static ModelParams init(const ModelConfig& cfg, std::size_t vocab_size, std::uint64_t seed);
};

struct ModelGrads {
    std::vector<GruParams> encoders;
    GruParams decoder;
    AttentionParams attention;
    Eigen::MatrixXd w_gen;
    Eigen::VectorXd b_gen;
    Eigen::MatrixXd w_copy;
    Eigen::VectorXd context_weights;
    double theta_non = 0.0;

    static ModelGrads zeros_like(const ModelParams& p);
    void set_zero();
};

// Named view over every trainable tensor, in a fixed order shared by params
// and grads. Element layout within a span follows Eigen's storage order.
struct TensorSpan {
    std::string name;  // group is the part before the first '.'
    double* data;
    std::size_t size;
};

std::vector<TensorSpan> tensor_spans(ModelParams& p);
std::vector<TensorSpan> tensor_spans(ModelGrads& g, const ModelConfig& cfg);

// A context bundle run through the per-context encoders, with the states of
// all active contexts pooled into one memory. Position p = ctx * l_max + t.
struct EncodedBundle {
    std::string method_id;
    Mode mode = Mode::Suggestion;
    std::size_t n_contexts = 0;
    std::size_t l_max = 0;
    std::size_t vocab_count = 0;
    Eigen::MatrixXd states;               // P x hidden; zero rows where masked
    std::vector<std::uint8_t> masked;     // P
    std::vector<std::size_t> context_of;  // P
    std::vector<std::string> token_at;    // P
    std::vector<std::size_t> cand_at;     // P, candidate id of the token
    // input tokens absent from the vocabulary, in first-seen position order;
    // candidate id of extended[k] is vocab_count + k
    std::vector<std::string> extended;
    std::unordered_map<std::string, std::size_t> extended_index;
    // kept for the backward pass
    std::vector<std::vector<GruStepCache>> encoder_caches;  // [ctx][t < true_len]
    std::vector<std::size_t> true_len;                      // [ctx]

    std::size_t candidate_count() const { return vocab_count + extended.size(); }
    std::string candidate_token(std::size_t cand, const Vocabulary& vocab) const;
    // maps unknown tokens to the placeholder id, like vocabulary lookup
    std::size_t candidate_of(const std::string& token, const Vocabulary& vocab) const;
};

EncodedBundle encode_bundle(const ModelParams& params, const ContextBundle& bundle,
                            const EmbeddingMatrix& emb, const Vocabulary& vocab);

struct DecodeState {
    Eigen::VectorXd h;
    std::string prev_token;  // padding token before the first step
};

DecodeState initial_state(const ModelParams& params);

// Full per-step output distribution with the per-factor breakdown retained.
struct StepDistribution {
    Eigen::VectorXd probs;    // candidate_count, sums to 1, padding entry 0
    Eigen::VectorXd gen;      // candidate_count, zero beyond the vocabulary
    Eigen::MatrixXd copy;     // n_contexts x candidate_count, each row sums to 1 or 0
    Eigen::VectorXd noncopy;  // candidate_count
    bool degenerate = false;  // every combined score clamped away; uniform fallback used
};

// Forward record of one decoder step, consumed by the backward pass.
struct StepCache {
    AttendCache attn;
    Eigen::VectorXd context_vec;
    GruStepCache gru;
    Eigen::VectorXd exp_gen;   // vocab, zero at padding
    double z_gen = 0.0;
    Eigen::VectorXd exp_copy;  // P, zero at masked positions
    std::vector<double> z_copy;
    Eigen::MatrixXd copy_acts;  // P x hidden, tanh(h_j w_copy); zero rows at masked
    StepDistribution dist;
};

// Probability that the bigram (prev, cand) does NOT continue an observed
// name. Zero when prev is out of the training dictionary, one when cand is,
// and 1 - count(prev cand) / count(prev) otherwise (1 when count(prev) == 0).
double prob_noncopy(const std::string& prev, const std::string& cand,
                    const BigramStats& stats, const Vocabulary& vocab);

// Pooled unnormalized copy mass per candidate: sum of exp(u) over every
// unmasked position holding that token.
Eigen::VectorXd score_copy(const ModelParams& params, const EncodedBundle& enc,
                           const Eigen::VectorXd& h_dec);

// Advances state.h; the caller sets state.prev_token after choosing a token.
StepDistribution decode_step(const ModelParams& params, const EncodedBundle& enc,
                             DecodeState& state, const EmbeddingMatrix& emb,
                             const Vocabulary& vocab, StepCache* cache = nullptr);

// highest-probability candidate; ties broken by lexicographic token order
std::size_t argmax_candidate(const StepDistribution& dist, const EncodedBundle& enc,
                             const Vocabulary& vocab);

std::vector<std::string> greedy_decode(const ModelParams& params, const EncodedBundle& enc,
                                       const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                       std::size_t max_len);

struct Hypothesis {
    std::vector<std::string> tokens;  // terminator excluded
    double sum_logp = 0.0;
    std::size_t steps = 0;  // decoder steps taken, terminator step included
    bool finished = false;

    double score() const { return steps == 0 ? 0.0 : sum_logp / static_cast<double>(steps); }
};

// Length-normalized beam search. Hypotheses finish at the terminator or when
// max_len tokens have been emitted. Returns at most beam_width hypotheses,
// best first; ties broken by lexicographic token sequence.
std::vector<Hypothesis> beam_decode(const ModelParams& params, const EncodedBundle& enc,
                                    const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                    std::size_t beam_width, std::size_t max_len);

struct TrainExample {
    ContextBundle bundle;
    std::vector<std::string> target;  // gold sub-tokens, terminator appended
};

struct TrainConfig {
    std::size_t epochs = 200;
    double lr = 0.1;
    double momentum = 0.9;
    double clip_norm = 5.0;
    double target_loss = 0.0;  // stop once the epoch loss drops this low
    bool freeze_context_weights = false;  // keep W_i at its 1/I initialization
    std::function<void(std::size_t epoch, double loss, const ModelParams&)> on_epoch;
};

// Mean per-step negative log likelihood of one example under teacher forcing.
double example_loss(const ModelParams& params, const TrainExample& ex,
                    const EmbeddingMatrix& emb, const Vocabulary& vocab);

// Same, also accumulating parameter gradients into grads.
double example_loss_and_grad(const ModelParams& params, const TrainExample& ex,
                             const EmbeddingMatrix& emb, const Vocabulary& vocab,
                             ModelGrads& grads);

// Full-batch gradient descent with momentum and global norm clipping.
// Returns the loss per epoch. Deterministic for fixed inputs.
std::vector<double> train(ModelParams& params, const std::vector<TrainExample>& data,
                          const EmbeddingMatrix& emb, const Vocabulary& vocab,
                          const TrainConfig& tc);

struct GradCheckReport {
    std::map<std::string, double> group_max_rel_err;
    double max_rel_err = 0.0;
};

// Central-difference check of every parameter against the analytic gradient.
// Relative error uses an absolute floor: |a - n| / max(|a| + |n|, 1e-3).
GradCheckReport grad_check(ModelParams& params, const TrainExample& ex,
                           const EmbeddingMatrix& emb, const Vocabulary& vocab,
                           double eps = 1e-5);

}  // namespace namekit
