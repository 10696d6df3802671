#include "namekit/tasks.hpp"

#include <algorithm>

#include "namekit/errors.hpp"
#include "namekit/specials.hpp"
#include "namekit/splitter.hpp"

namespace namekit {

MethodRepresentation represent_method(const ModelParams& params, const EncodedBundle& enc,
                                      const EmbeddingMatrix& emb, const Vocabulary& vocab) {
    MethodRepresentation rep;
    std::vector<Eigen::VectorXd> rows;
    DecodeState state = initial_state(params);
    while (rep.tokens.size() < params.cfg.max_name_len) {
        StepDistribution dist = decode_step(params, enc, state, emb, vocab);
        const std::size_t c = argmax_candidate(dist, enc, vocab);
        if (c == kEonIndex) break;
        const std::string tok = enc.candidate_token(c, vocab);
        // copied out-of-vocabulary tokens carry the placeholder vector
        const std::size_t row = c < enc.vocab_count ? c : kUnkIndex;
        rows.push_back(emb.rows.row(static_cast<Eigen::Index>(row)).transpose());
        rep.tokens.push_back(tok);
        state.prev_token = tok;
    }
    rep.empty = rows.empty();
    rep.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), emb.dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rep.vectors.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return rep;
}

Eigen::MatrixXd pad_rows(const Eigen::MatrixXd& m, int length) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(length, m.cols());
    const Eigen::Index keep = std::min<Eigen::Index>(m.rows(), length);
    out.topRows(keep) = m.topRows(keep);
    return out;
}

Eigen::MatrixXd embed_name(const std::vector<std::string>& subtokens,
                           const EmbeddingMatrix& emb, const Vocabulary& vocab) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(subtokens.size()), emb.dim());
    for (std::size_t i = 0; i < subtokens.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) =
            emb.rows.row(static_cast<Eigen::Index>(vocab.lookup(subtokens[i])));
    }
    return out;
}

CheckResult check_consistency(const ModelParams& params, const CheckerParams& checker,
                              const EncodedBundle& enc,
                              const std::vector<std::string>& name_subtokens,
                              const EmbeddingMatrix& emb, const Vocabulary& vocab) {
    if (name_subtokens.empty()) {
        throw EmptyName("check_consistency: the existing name has no sub-tokens");
    }
    MethodRepresentation rep = represent_method(params, enc, emb, vocab);
    Eigen::MatrixXd name_mat = embed_name(name_subtokens, emb, vocab);

    CheckResult res;
    res.empty_representation = rep.empty;
    res.p_inconsistent = checker_forward(checker, pad_rows(rep.vectors, checker.length),
                                         pad_rows(name_mat, checker.length));
    res.inconsistent = res.p_inconsistent > 0.5;
    return res;
}

std::vector<Suggestion> suggest_name(const ModelParams& params, const EncodedBundle& enc,
                                     const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                     std::size_t k) {
    auto beams = beam_decode(params, enc, emb, vocab, params.cfg.beam_width,
                             params.cfg.max_name_len);
    std::vector<Suggestion> out;
    for (const auto& hyp : beams) {
        if (hyp.tokens.empty()) continue;  // an empty name is never suggested
        Suggestion s;
        s.score = hyp.score();
        for (const auto& tok : hyp.tokens) {
            const std::size_t id = vocab.lookup(tok);
            if (id == kUnkIndex && tok != kUnkToken) {
                s.tokens.push_back(tok);  // copied from the input, kept verbatim
            } else {
                const std::size_t rolled =
                    nearest_token(emb.rows.row(static_cast<Eigen::Index>(id)).transpose(), emb);
                s.tokens.push_back(vocab.tokens[rolled]);
            }
        }
        s.rendered = recompose_camel(s.tokens);
        out.push_back(std::move(s));
        if (out.size() == k) break;
    }
    return out;
}

}  // namespace namekit
