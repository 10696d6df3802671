#include "namekit/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "namekit/errors.hpp"
#include "namekit/specials.hpp"

namespace namekit {

double ModelParams::w_non() const {
    // -softplus keeps the weight strictly negative for any theta
    if (theta_non > 30.0) return -theta_non;
    return -std::log1p(std::exp(theta_non));
}

ModelParams ModelParams::init(const ModelConfig& cfg, std::size_t vocab_size,
                              std::uint64_t seed) {
    if (cfg.contexts.empty()) {
        throw ConfigError("model: at least one context must be active");
    }
    if (vocab_size < 3) {
        throw DegenerateCorpus("model: vocabulary holds nothing beyond special tokens");
    }
    if (cfg.embed_dim < 1 || cfg.hidden_dim < 1) {
        throw ConfigError("model: embedding and hidden sizes must be positive");
    }
    ModelParams p;
    p.cfg = cfg;
    Rng rng(seed);
    for (std::size_t i = 0; i < cfg.contexts.size(); ++i) {
        p.encoders.push_back(GruParams::init(cfg.embed_dim, cfg.hidden_dim, rng, cfg.init_scale));
    }
    p.decoder = GruParams::init(cfg.hidden_dim + cfg.embed_dim, cfg.hidden_dim, rng,
                                cfg.init_scale);
    p.attention = AttentionParams::init(cfg.hidden_dim, cfg.hidden_dim, rng, cfg.init_scale);
    p.w_gen = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vocab_size), cfg.hidden_dim);
    for (Eigen::Index i = 0; i < p.w_gen.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.w_gen.cols(); ++j) {
            p.w_gen(i, j) = rng.uniform(-cfg.init_scale, cfg.init_scale);
        }
    }
    p.b_gen = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vocab_size));
    p.w_copy = Eigen::MatrixXd::Zero(cfg.hidden_dim, cfg.hidden_dim);
    for (Eigen::Index i = 0; i < p.w_copy.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.w_copy.cols(); ++j) {
            p.w_copy(i, j) = rng.uniform(-cfg.init_scale, cfg.init_scale);
        }
    }
    p.context_weights =
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(cfg.contexts.size()),
                                  1.0 / static_cast<double>(cfg.contexts.size()));
    p.theta_non = cfg.theta_non_init;
    return p;
}

ModelGrads ModelGrads::zeros_like(const ModelParams& p) {
    ModelGrads g;
    for (const auto& e : p.encoders) {
        g.encoders.push_back(GruParams::zeros(e.input_dim(), e.hidden_dim()));
    }
    g.decoder = GruParams::zeros(p.decoder.input_dim(), p.decoder.hidden_dim());
    g.attention = AttentionParams::zeros(p.cfg.hidden_dim, static_cast<int>(p.attention.w.rows()));
    g.w_gen = Eigen::MatrixXd::Zero(p.w_gen.rows(), p.w_gen.cols());
    g.b_gen = Eigen::VectorXd::Zero(p.b_gen.size());
    g.w_copy = Eigen::MatrixXd::Zero(p.w_copy.rows(), p.w_copy.cols());
    g.context_weights = Eigen::VectorXd::Zero(p.context_weights.size());
    g.theta_non = 0.0;
    return g;
}

void ModelGrads::set_zero() {
    for (auto& e : encoders) {
        e.w_z.setZero(); e.w_r.setZero(); e.w_c.setZero();
        e.u_z.setZero(); e.u_r.setZero(); e.u_c.setZero();
        e.b_z.setZero(); e.b_r.setZero(); e.b_c.setZero();
    }
    decoder.w_z.setZero(); decoder.w_r.setZero(); decoder.w_c.setZero();
    decoder.u_z.setZero(); decoder.u_r.setZero(); decoder.u_c.setZero();
    decoder.b_z.setZero(); decoder.b_r.setZero(); decoder.b_c.setZero();
    attention.w.setZero(); attention.b.setZero(); attention.v.setZero();
    w_gen.setZero(); b_gen.setZero(); w_copy.setZero();
    context_weights.setZero();
    theta_non = 0.0;
}

namespace {

void push_gru_spans(std::vector<TensorSpan>& out, const std::string& prefix, GruParams& g) {
    out.push_back({prefix + ".w_z", g.w_z.data(), static_cast<std::size_t>(g.w_z.size())});
    out.push_back({prefix + ".u_z", g.u_z.data(), static_cast<std::size_t>(g.u_z.size())});
    out.push_back({prefix + ".b_z", g.b_z.data(), static_cast<std::size_t>(g.b_z.size())});
    out.push_back({prefix + ".w_r", g.w_r.data(), static_cast<std::size_t>(g.w_r.size())});
    out.push_back({prefix + ".u_r", g.u_r.data(), static_cast<std::size_t>(g.u_r.size())});
    out.push_back({prefix + ".b_r", g.b_r.data(), static_cast<std::size_t>(g.b_r.size())});
    out.push_back({prefix + ".w_c", g.w_c.data(), static_cast<std::size_t>(g.w_c.size())});
    out.push_back({prefix + ".u_c", g.u_c.data(), static_cast<std::size_t>(g.u_c.size())});
    out.push_back({prefix + ".b_c", g.b_c.data(), static_cast<std::size_t>(g.b_c.size())});
}

template <class Holder>
std::vector<TensorSpan> spans_impl(Holder& h, const std::vector<ContextKind>& contexts) {
    std::vector<TensorSpan> out;
    for (std::size_t i = 0; i < h.encoders.size(); ++i) {
        push_gru_spans(out, "encoder_" + std::string(context_name(contexts[i])), h.encoders[i]);
    }
    push_gru_spans(out, "decoder", h.decoder);
    out.push_back({"attention.w", h.attention.w.data(), static_cast<std::size_t>(h.attention.w.size())});
    out.push_back({"attention.b", h.attention.b.data(), static_cast<std::size_t>(h.attention.b.size())});
    out.push_back({"attention.v", h.attention.v.data(), static_cast<std::size_t>(h.attention.v.size())});
    out.push_back({"w_gen", h.w_gen.data(), static_cast<std::size_t>(h.w_gen.size())});
    out.push_back({"b_gen", h.b_gen.data(), static_cast<std::size_t>(h.b_gen.size())});
    out.push_back({"w_copy", h.w_copy.data(), static_cast<std::size_t>(h.w_copy.size())});
    out.push_back({"context_weights", h.context_weights.data(),
                   static_cast<std::size_t>(h.context_weights.size())});
    out.push_back({"theta_non", &h.theta_non, 1});
    return out;
}

}  // namespace

std::vector<TensorSpan> tensor_spans(ModelParams& p) { return spans_impl(p, p.cfg.contexts); }

std::vector<TensorSpan> tensor_spans(ModelGrads& g, const ModelConfig& cfg) {
    return spans_impl(g, cfg.contexts);
}

std::string EncodedBundle::candidate_token(std::size_t cand, const Vocabulary& vocab) const {
    if (cand < vocab_count) return vocab.tokens[cand];
    return extended[cand - vocab_count];
}

std::size_t EncodedBundle::candidate_of(const std::string& token, const Vocabulary& vocab) const {
    std::size_t id = vocab.lookup(token);
    if (id != kUnkIndex || token == kUnkToken) return id;
    auto it = extended_index.find(token);
    if (it != extended_index.end()) return vocab_count + it->second;
    return kUnkIndex;
}

EncodedBundle encode_bundle(const ModelParams& params, const ContextBundle& bundle,
                            const EmbeddingMatrix& emb, const Vocabulary& vocab) {
    const auto& cfg = params.cfg;
    if (emb.dim() != cfg.embed_dim) {
        throw DimensionMismatch("encode_bundle: embedding width does not match the model");
    }
    if (emb.vocab_size() != vocab.size() || vocab.size() != params.vocab_size()) {
        throw DimensionMismatch("encode_bundle: vocabulary size disagreement");
    }

    EncodedBundle enc;
    enc.method_id = bundle.method_id;
    enc.mode = bundle.mode;
    enc.n_contexts = cfg.contexts.size();
    enc.l_max = cfg.l_max;
    enc.vocab_count = vocab.size();

    const std::size_t rows = enc.n_contexts * cfg.l_max;
    enc.states = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), cfg.hidden_dim);
    enc.masked.assign(rows, 1);
    enc.context_of.assign(rows, 0);
    enc.token_at.assign(rows, kPadToken);
    enc.cand_at.assign(rows, kPadIndex);
    enc.encoder_caches.resize(enc.n_contexts);
    enc.true_len.assign(enc.n_contexts, 0);

    for (std::size_t ci = 0; ci < enc.n_contexts; ++ci) {
        const TokenSeq& seq = bundle.get(cfg.contexts[ci]);
        if (seq.tokens.size() != cfg.l_max) {
            throw DimensionMismatch("encode_bundle: context length does not match l_max");
        }
        enc.true_len[ci] = std::min(seq.true_length, cfg.l_max);
        enc.encoder_caches[ci].resize(enc.true_len[ci]);
        Eigen::VectorXd h = Eigen::VectorXd::Zero(cfg.hidden_dim);
        for (std::size_t t = 0; t < cfg.l_max; ++t) {
            const std::size_t p = ci * cfg.l_max + t;
            enc.context_of[p] = ci;
            enc.token_at[p] = seq.tokens[t];
            if (t < enc.true_len[ci]) {
                Eigen::VectorXd x =
                    emb.rows.row(static_cast<Eigen::Index>(vocab.lookup(seq.tokens[t])))
                        .transpose();
                h = gru_step(x, h, params.encoders[ci], &enc.encoder_caches[ci][t]);
                enc.states.row(static_cast<Eigen::Index>(p)) = h.transpose();
                enc.masked[p] = 0;
            }
        }
    }

    // extended candidate ids, assigned by first unmasked occurrence
    for (std::size_t p = 0; p < rows; ++p) {
        if (enc.masked[p]) continue;
        const std::string& tok = enc.token_at[p];
        std::size_t id = vocab.lookup(tok);
        if (id == kUnkIndex && tok != kUnkToken) {
            auto it = enc.extended_index.find(tok);
            if (it == enc.extended_index.end()) {
                it = enc.extended_index.emplace(tok, enc.extended.size()).first;
                enc.extended.push_back(tok);
            }
            enc.cand_at[p] = enc.vocab_count + it->second;
        } else {
            enc.cand_at[p] = id;
        }
    }
    return enc;
}

DecodeState initial_state(const ModelParams& params) {
    DecodeState s;
    s.h = Eigen::VectorXd::Zero(params.cfg.hidden_dim);
    s.prev_token = kPadToken;
    return s;
}

double prob_noncopy(const std::string& prev, const std::string& cand,
                    const BigramStats& stats, const Vocabulary& vocab) {
    if (!vocab.in_dic_all(prev)) return 0.0;
    if (!vocab.in_dic_all(cand)) return 1.0;
    const std::uint64_t seen = stats.count(prev);
    if (seen == 0) return 1.0;
    const std::uint64_t follow = stats.count_pair(prev, cand);
    return 1.0 - static_cast<double>(follow) / static_cast<double>(seen);
}

namespace {

// exp(u) per memory position, u = tanh(h_j w_copy) . h_dec; zero at masked.
void copy_position_scores(const ModelParams& params, const EncodedBundle& enc,
                          const Eigen::VectorXd& h_dec, Eigen::VectorXd& exp_u,
                          Eigen::MatrixXd* acts_out) {
    const Eigen::Index rows = enc.states.rows();
    exp_u = Eigen::VectorXd::Zero(rows);
    if (acts_out != nullptr) {
        *acts_out = Eigen::MatrixXd::Zero(rows, params.cfg.hidden_dim);
    }
    for (Eigen::Index p = 0; p < rows; ++p) {
        if (enc.masked[static_cast<std::size_t>(p)]) continue;
        Eigen::VectorXd act =
            (params.w_copy.transpose() * enc.states.row(p).transpose()).array().tanh().matrix();
        exp_u(p) = std::exp(act.dot(h_dec));
        if (acts_out != nullptr) acts_out->row(p) = act.transpose();
    }
}

}  // namespace

Eigen::VectorXd score_copy(const ModelParams& params, const EncodedBundle& enc,
                           const Eigen::VectorXd& h_dec) {
    Eigen::VectorXd exp_u;
    copy_position_scores(params, enc, h_dec, exp_u, nullptr);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(enc.candidate_count()));
    for (Eigen::Index p = 0; p < exp_u.size(); ++p) {
        if (enc.masked[static_cast<std::size_t>(p)]) continue;
        out(static_cast<Eigen::Index>(enc.cand_at[static_cast<std::size_t>(p)])) += exp_u(p);
    }
    return out;
}

StepDistribution decode_step(const ModelParams& params, const EncodedBundle& enc,
                             DecodeState& state, const EmbeddingMatrix& emb,
                             const Vocabulary& vocab, StepCache* cache) {
    const auto& cfg = params.cfg;
    const std::size_t n_cand = enc.candidate_count();
    const Eigen::Index cand = static_cast<Eigen::Index>(n_cand);

    AttendCache local_attn;
    AttendCache* attn_cache = cache != nullptr ? &cache->attn : &local_attn;
    Eigen::VectorXd ctx_vec = attend(state.h, enc.states, enc.masked, params.attention, attn_cache);

    Eigen::VectorXd x(cfg.hidden_dim + cfg.embed_dim);
    x << ctx_vec,
        emb.rows.row(static_cast<Eigen::Index>(vocab.lookup(state.prev_token))).transpose();
    GruStepCache local_gru;
    GruStepCache* gru_cache = cache != nullptr ? &cache->gru : &local_gru;
    Eigen::VectorXd h = gru_step(x, state.h, params.decoder, gru_cache);
    state.h = h;

    StepDistribution dist;
    dist.gen = Eigen::VectorXd::Zero(cand);
    dist.copy = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(enc.n_contexts), cand);
    dist.noncopy = Eigen::VectorXd::Zero(cand);

    // generation scores: a softmax over the vocabulary without padding
    Eigen::VectorXd u_gen = params.w_gen * h + params.b_gen;
    double shift = -std::numeric_limits<double>::infinity();
    for (Eigen::Index w = 0; w < u_gen.size(); ++w) {
        if (w == static_cast<Eigen::Index>(kPadIndex)) continue;
        shift = std::max(shift, u_gen(w));
    }
    Eigen::VectorXd exp_gen = Eigen::VectorXd::Zero(u_gen.size());
    double z_gen = 0.0;
    for (Eigen::Index w = 0; w < u_gen.size(); ++w) {
        if (w == static_cast<Eigen::Index>(kPadIndex)) continue;
        exp_gen(w) = std::exp(u_gen(w) - shift);
        z_gen += exp_gen(w);
    }
    for (Eigen::Index w = 0; w < u_gen.size(); ++w) {
        dist.gen(w) = exp_gen(w) / z_gen;
    }

    Eigen::VectorXd exp_copy;
    Eigen::MatrixXd copy_acts;
    std::vector<double> z_copy(enc.n_contexts, 0.0);
    if (cfg.use_copy) {
        copy_position_scores(params, enc, h, exp_copy, cache != nullptr ? &copy_acts : nullptr);
        for (Eigen::Index p = 0; p < exp_copy.size(); ++p) {
            if (enc.masked[static_cast<std::size_t>(p)]) continue;
            z_copy[enc.context_of[static_cast<std::size_t>(p)]] += exp_copy(p);
        }
        for (Eigen::Index p = 0; p < exp_copy.size(); ++p) {
            const auto up = static_cast<std::size_t>(p);
            if (enc.masked[up]) continue;
            const std::size_t ci = enc.context_of[up];
            if (z_copy[ci] <= 0.0) continue;
            dist.copy(static_cast<Eigen::Index>(ci), static_cast<Eigen::Index>(enc.cand_at[up])) +=
                exp_copy(p) / z_copy[ci];
        }
        if (cfg.use_noncopy) {
            for (Eigen::Index c = 1; c < cand; ++c) {
                dist.noncopy(c) = prob_noncopy(state.prev_token,
                                               enc.candidate_token(static_cast<std::size_t>(c), vocab),
                                               params.stats, vocab);
            }
        }
    }

    Eigen::VectorXd raw = dist.gen;
    if (cfg.use_copy) {
        raw += dist.copy.transpose() * params.context_weights;
        if (cfg.use_noncopy) {
            raw += params.w_non() * dist.noncopy;
        }
    }
    raw(static_cast<Eigen::Index>(kPadIndex)) = 0.0;

    Eigen::VectorXd clamped = raw.cwiseMax(0.0);
    const double z = clamped.sum();
    if (!std::isfinite(z)) {
        throw NonFiniteLoss("decode_step: combined scores are not finite");
    }
    if (z > 0.0) {
        dist.probs = clamped / z;
    } else {
        // every score clamped away: fall back to a flagged uniform over the
        // training dictionary
        dist.degenerate = true;
        dist.probs = Eigen::VectorXd::Zero(cand);
        std::vector<Eigen::Index> in_dic;
        for (std::size_t w = 0; w < enc.vocab_count; ++w) {
            if (vocab.in_dic_all(vocab.tokens[w])) in_dic.push_back(static_cast<Eigen::Index>(w));
        }
        for (Eigen::Index w : in_dic) {
            dist.probs(w) = 1.0 / static_cast<double>(in_dic.size());
        }
    }

    if (cache != nullptr) {
        cache->context_vec = std::move(ctx_vec);
        cache->exp_gen = std::move(exp_gen);
        cache->z_gen = z_gen;
        cache->exp_copy = std::move(exp_copy);
        cache->z_copy = std::move(z_copy);
        cache->copy_acts = std::move(copy_acts);
        cache->dist = dist;
    }
    return dist;
}

std::size_t argmax_candidate(const StepDistribution& dist, const EncodedBundle& enc,
                             const Vocabulary& vocab) {
    std::size_t best = 0;
    double best_p = -1.0;
    std::string best_tok;
    for (std::size_t c = 0; c < enc.candidate_count(); ++c) {
        const double p = dist.probs(static_cast<Eigen::Index>(c));
        if (p <= 0.0) continue;
        std::string tok = enc.candidate_token(c, vocab);
        if (p > best_p || (p == best_p && tok < best_tok)) {
            best = c;
            best_p = p;
            best_tok = std::move(tok);
        }
    }
    return best;
}

std::vector<std::string> greedy_decode(const ModelParams& params, const EncodedBundle& enc,
                                       const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                       std::size_t max_len) {
    std::vector<std::string> out;
    DecodeState state = initial_state(params);
    while (out.size() < max_len) {
        StepDistribution dist = decode_step(params, enc, state, emb, vocab);
        const std::size_t c = argmax_candidate(dist, enc, vocab);
        if (c == kEonIndex) break;
        const std::string tok = enc.candidate_token(c, vocab);
        out.push_back(tok);
        state.prev_token = tok;
    }
    return out;
}

namespace {

struct BeamItem {
    Hypothesis hyp;
    DecodeState state;
};

bool better(const Hypothesis& a, const Hypothesis& b) {
    if (a.score() != b.score()) return a.score() > b.score();
    return a.tokens < b.tokens;
}

}  // namespace

std::vector<Hypothesis> beam_decode(const ModelParams& params, const EncodedBundle& enc,
                                    const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                    std::size_t beam_width, std::size_t max_len) {
    if (beam_width == 0) {
        throw ConfigError("beam_decode: beam width must be positive");
    }
    std::vector<BeamItem> live;
    live.push_back({Hypothesis{}, initial_state(params)});
    std::vector<Hypothesis> finished;

    while (!live.empty()) {
        std::vector<BeamItem> pool;
        for (auto& item : live) {
            DecodeState stepped = item.state;
            StepDistribution dist = decode_step(params, enc, stepped, emb, vocab);
            for (std::size_t c = 0; c < enc.candidate_count(); ++c) {
                const double p = dist.probs(static_cast<Eigen::Index>(c));
                if (p <= 0.0) continue;
                BeamItem next;
                next.hyp = item.hyp;
                next.hyp.sum_logp += std::log(p);
                next.hyp.steps += 1;
                next.state = stepped;
                if (c == kEonIndex) {
                    next.hyp.finished = true;
                } else {
                    const std::string tok = enc.candidate_token(c, vocab);
                    next.hyp.tokens.push_back(tok);
                    next.state.prev_token = tok;
                    if (next.hyp.tokens.size() >= max_len) next.hyp.finished = true;
                }
                pool.push_back(std::move(next));
            }
        }
        std::sort(pool.begin(), pool.end(),
                  [](const BeamItem& a, const BeamItem& b) { return better(a.hyp, b.hyp); });
        if (pool.size() > beam_width) pool.resize(beam_width);
        live.clear();
        for (auto& item : pool) {
            if (item.hyp.finished) {
                finished.push_back(std::move(item.hyp));
            } else {
                live.push_back(std::move(item));
            }
        }
    }

    std::sort(finished.begin(), finished.end(), better);
    if (finished.size() > beam_width) finished.resize(beam_width);
    return finished;
}

}  // namespace namekit
