#include <algorithm>
#include <cmath>
#include <vector>

#include "namekit/errors.hpp"
#include "namekit/model.hpp"
#include "namekit/parallel.hpp"
#include "namekit/specials.hpp"

namespace namekit {
namespace {

constexpr double kLossEps = 1e-12;
constexpr std::size_t kBatchBlock = 8;  // fixed reduction granularity, thread-count independent

std::vector<std::size_t> target_candidates(const EncodedBundle& enc,
                                           const std::vector<std::string>& target,
                                           const Vocabulary& vocab) {
    if (target.empty() || target.back() != kEonToken) {
        throw EmptyName("train: target must end with the terminator");
    }
    std::vector<std::size_t> ids;
    ids.reserve(target.size());
    for (const auto& tok : target) {
        ids.push_back(enc.candidate_of(tok, vocab));
    }
    return ids;
}

struct ForwardRecord {
    EncodedBundle enc;
    std::vector<StepCache> steps;
    std::vector<std::size_t> targets;
    double loss = 0.0;
};

ForwardRecord run_forward(const ModelParams& params, const TrainExample& ex,
                          const EmbeddingMatrix& emb, const Vocabulary& vocab,
                          bool keep_caches) {
    ForwardRecord rec;
    rec.enc = encode_bundle(params, ex.bundle, emb, vocab);
    rec.targets = target_candidates(rec.enc, ex.target, vocab);
    const std::size_t steps = rec.targets.size();
    if (keep_caches) rec.steps.resize(steps);

    DecodeState state = initial_state(params);
    double total = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        StepCache* cache = keep_caches ? &rec.steps[t] : nullptr;
        StepDistribution dist = decode_step(params, rec.enc, state, emb, vocab, cache);
        const double p = dist.probs(static_cast<Eigen::Index>(rec.targets[t]));
        total += -std::log(p + kLossEps);
        state.prev_token = ex.target[t];
    }
    rec.loss = total / static_cast<double>(steps);
    return rec;
}

}  // namespace

double example_loss(const ModelParams& params, const TrainExample& ex,
                    const EmbeddingMatrix& emb, const Vocabulary& vocab) {
    return run_forward(params, ex, emb, vocab, false).loss;
}

double example_loss_and_grad(const ModelParams& params, const TrainExample& ex,
                             const EmbeddingMatrix& emb, const Vocabulary& vocab,
                             ModelGrads& grads) {
    ForwardRecord rec = run_forward(params, ex, emb, vocab, true);
    const auto& cfg = params.cfg;
    const auto& enc = rec.enc;
    const std::size_t steps = rec.targets.size();
    const double inv_steps = 1.0 / static_cast<double>(steps);
    const Eigen::Index n_cand = static_cast<Eigen::Index>(enc.candidate_count());
    const double w_non = params.w_non();

    Eigen::MatrixXd d_states = Eigen::MatrixXd::Zero(enc.states.rows(), enc.states.cols());
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(cfg.hidden_dim);

    for (std::size_t rt = steps; rt-- > 0;) {
        const StepCache& cache = rec.steps[rt];
        const StepDistribution& dist = cache.dist;
        const std::size_t g = rec.targets[rt];
        // state produced by this step
        Eigen::VectorXd h_new =
            ((1.0 - cache.gru.z.array()) * cache.gru.h_prev.array() +
             cache.gru.z.array() * cache.gru.c.array())
                .matrix();

        Eigen::VectorXd dh = dh_next;

        if (!dist.degenerate) {
            const double p_gold = dist.probs(static_cast<Eigen::Index>(g));
            const double d_loss = -inv_steps / (p_gold + kLossEps);
            Eigen::VectorXd raw = Eigen::VectorXd::Zero(n_cand);
            double z_comb = 0.0;
            for (Eigen::Index c = 0; c < n_cand; ++c) {
                if (c == static_cast<Eigen::Index>(kPadIndex)) continue;
                raw(c) = dist.gen(c) +
                         (cfg.use_copy ? dist.copy.col(c).dot(params.context_weights) +
                                             (cfg.use_noncopy ? w_non * dist.noncopy(c) : 0.0)
                                       : 0.0);
                z_comb += std::max(raw(c), 0.0);
            }
            // probs = clamped / z; d clamped_c = d_loss * (1[c==g] - p_gold) / z
            // with the clamp zeroing entries whose raw score was negative
            Eigen::VectorXd d_raw = Eigen::VectorXd::Zero(n_cand);
            for (Eigen::Index c = 0; c < n_cand; ++c) {
                if (c == static_cast<Eigen::Index>(kPadIndex) || raw(c) <= 0.0) continue;
                const double indicator = (c == static_cast<Eigen::Index>(g)) ? 1.0 : 0.0;
                d_raw(c) = d_loss * (indicator - p_gold) / z_comb;
            }

            // generation softmax
            Eigen::VectorXd d_gen_p = d_raw.head(static_cast<Eigen::Index>(enc.vocab_count));
            Eigen::VectorXd p_gen = cache.exp_gen / cache.z_gen;
            const double dot = d_gen_p.dot(p_gen);
            Eigen::VectorXd d_u_gen = (p_gen.array() * (d_gen_p.array() - dot)).matrix();
            grads.w_gen += d_u_gen * h_new.transpose();
            grads.b_gen += d_u_gen;
            dh += params.w_gen.transpose() * d_u_gen;

            if (cfg.use_copy) {
                for (std::size_t ci = 0; ci < enc.n_contexts; ++ci) {
                    grads.context_weights(static_cast<Eigen::Index>(ci)) +=
                        dist.copy.row(static_cast<Eigen::Index>(ci)).dot(d_raw);
                }
                if (cfg.use_noncopy) {
                    const double d_w_non = dist.noncopy.dot(d_raw);
                    // w_non = -softplus(theta)
                    grads.theta_non += d_w_non * (-1.0 / (1.0 + std::exp(-params.theta_non)));
                }
                for (std::size_t ci = 0; ci < enc.n_contexts; ++ci) {
                    const double z_i = cache.z_copy[ci];
                    if (z_i <= 0.0) continue;
                    const double w_i = params.context_weights(static_cast<Eigen::Index>(ci));
                    // d p_copy(ci, c) = d_raw(c) * w_i
                    double dot_i = 0.0;
                    for (Eigen::Index c = 0; c < n_cand; ++c) {
                        dot_i += d_raw(c) * w_i * dist.copy(static_cast<Eigen::Index>(ci), c);
                    }
                    for (std::size_t t2 = 0; t2 < enc.l_max; ++t2) {
                        const std::size_t p = ci * enc.l_max + t2;
                        if (enc.masked[p]) continue;
                        const Eigen::Index pe = static_cast<Eigen::Index>(p);
                        const double d_exp =
                            (d_raw(static_cast<Eigen::Index>(enc.cand_at[p])) * w_i - dot_i) / z_i;
                        const double d_u = d_exp * cache.exp_copy(pe);
                        Eigen::VectorXd act = cache.copy_acts.row(pe).transpose();
                        dh += d_u * act;
                        Eigen::VectorXd d_act_pre =
                            ((d_u * h_new).array() * (1.0 - act.array().square())).matrix();
                        grads.w_copy += enc.states.row(pe).transpose() * d_act_pre.transpose();
                        d_states.row(pe) += (params.w_copy * d_act_pre).transpose();
                    }
                }
            }
        }

        Eigen::VectorXd dh_prev_gru, dx;
        gru_step_backward(dh, cache.gru, params.decoder, grads.decoder, dh_prev_gru, dx);
        Eigen::VectorXd d_ctx = dx.head(cfg.hidden_dim);

        Eigen::VectorXd d_query;
        attend_backward(d_ctx, cache.attn, enc.states, enc.masked, params.attention,
                        grads.attention, d_query, d_states);

        dh_next = dh_prev_gru + d_query;
    }

    // encoder backward; the initial decoder state is constant zero, so dh_next
    // is dropped here
    for (std::size_t ci = 0; ci < enc.n_contexts; ++ci) {
        Eigen::VectorXd carry = Eigen::VectorXd::Zero(cfg.hidden_dim);
        for (std::size_t t = enc.true_len[ci]; t-- > 0;) {
            const Eigen::Index pe = static_cast<Eigen::Index>(ci * enc.l_max + t);
            Eigen::VectorXd dh_enc = d_states.row(pe).transpose() + carry;
            Eigen::VectorXd dx_enc;
            gru_step_backward(dh_enc, enc.encoder_caches[ci][t], params.encoders[ci],
                              grads.encoders[ci], carry, dx_enc);
        }
    }
    return rec.loss;
}

namespace {

void scale_grads(ModelGrads& g, const ModelConfig& cfg, double factor) {
    for (auto& span : tensor_spans(g, cfg)) {
        for (std::size_t i = 0; i < span.size; ++i) span.data[i] *= factor;
    }
}

void add_grads(ModelGrads& into, ModelGrads& from, const ModelConfig& cfg) {
    auto dst = tensor_spans(into, cfg);
    auto src = tensor_spans(from, cfg);
    for (std::size_t s = 0; s < dst.size(); ++s) {
        for (std::size_t i = 0; i < dst[s].size; ++i) dst[s].data[i] += src[s].data[i];
    }
}

double grad_norm(ModelGrads& g, const ModelConfig& cfg) {
    double sq = 0.0;
    for (auto& span : tensor_spans(g, cfg)) {
        for (std::size_t i = 0; i < span.size; ++i) sq += span.data[i] * span.data[i];
    }
    return std::sqrt(sq);
}

}  // namespace

std::vector<double> train(ModelParams& params, const std::vector<TrainExample>& data,
                          const EmbeddingMatrix& emb, const Vocabulary& vocab,
                          const TrainConfig& tc) {
    if (data.empty()) {
        throw DegenerateCorpus("train: no training examples");
    }
    if (tc.lr <= 0.0 || tc.clip_norm <= 0.0) {
        throw ConfigError("train: learning rate and clip norm must be positive");
    }
    const std::size_t n = data.size();
    const std::size_t blocks = (n + kBatchBlock - 1) / kBatchBlock;
    std::vector<ModelGrads> block_grads;
    block_grads.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) block_grads.push_back(ModelGrads::zeros_like(params));
    std::vector<double> block_loss(blocks, 0.0);

    ModelGrads total = ModelGrads::zeros_like(params);
    ModelGrads velocity = ModelGrads::zeros_like(params);
    std::vector<double> losses;
    losses.reserve(tc.epochs);

    for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
        parallel_for(blocks, [&](std::size_t b) {
            block_grads[b].set_zero();
            block_loss[b] = 0.0;
            const std::size_t lo = b * kBatchBlock;
            const std::size_t hi = std::min(n, lo + kBatchBlock);
            for (std::size_t i = lo; i < hi; ++i) {
                block_loss[b] += example_loss_and_grad(params, data[i], emb, vocab, block_grads[b]);
            }
        });

        total.set_zero();
        double loss = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
            add_grads(total, block_grads[b], params.cfg);
            loss += block_loss[b];
        }
        loss /= static_cast<double>(n);
        if (!std::isfinite(loss)) {
            throw NonFiniteLoss("train: loss diverged at epoch " + std::to_string(epoch));
        }
        scale_grads(total, params.cfg, 1.0 / static_cast<double>(n));

        // frozen weights neither move nor count toward the clipping norm
        if (tc.freeze_context_weights) {
            for (auto& span : tensor_spans(total, params.cfg)) {
                if (span.name != "context_weights") continue;
                for (std::size_t i = 0; i < span.size; ++i) span.data[i] = 0.0;
            }
        }

        const double norm = grad_norm(total, params.cfg);
        if (norm > tc.clip_norm) {
            scale_grads(total, params.cfg, tc.clip_norm / norm);
        }

        auto p_spans = tensor_spans(params);
        auto v_spans = tensor_spans(velocity, params.cfg);
        auto g_spans = tensor_spans(total, params.cfg);
        for (std::size_t s = 0; s < p_spans.size(); ++s) {
            for (std::size_t i = 0; i < p_spans[s].size; ++i) {
                v_spans[s].data[i] = tc.momentum * v_spans[s].data[i] - tc.lr * g_spans[s].data[i];
                p_spans[s].data[i] += v_spans[s].data[i];
            }
        }

        losses.push_back(loss);
        if (tc.on_epoch) tc.on_epoch(epoch, loss, params);
        if (loss <= tc.target_loss) break;
    }
    return losses;
}

GradCheckReport grad_check(ModelParams& params, const TrainExample& ex,
                           const EmbeddingMatrix& emb, const Vocabulary& vocab, double eps) {
    ModelGrads analytic = ModelGrads::zeros_like(params);
    example_loss_and_grad(params, ex, emb, vocab, analytic);

    GradCheckReport report;
    auto p_spans = tensor_spans(params);
    auto g_spans = tensor_spans(analytic, params.cfg);
    for (std::size_t s = 0; s < p_spans.size(); ++s) {
        const std::string group = p_spans[s].name.substr(0, p_spans[s].name.find('.'));
        double& group_err = report.group_max_rel_err[group];
        for (std::size_t i = 0; i < p_spans[s].size; ++i) {
            const double saved = p_spans[s].data[i];
            p_spans[s].data[i] = saved + eps;
            const double up = example_loss(params, ex, emb, vocab);
            p_spans[s].data[i] = saved - eps;
            const double down = example_loss(params, ex, emb, vocab);
            p_spans[s].data[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double a = g_spans[s].data[i];
            const double err = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-3);
            group_err = std::max(group_err, err);
            report.max_rel_err = std::max(report.max_rel_err, err);
        }
    }
    return report;
}

}  // namespace namekit
