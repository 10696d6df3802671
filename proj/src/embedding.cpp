#include "namekit/embedding.hpp"

#include <cmath>

#include "namekit/errors.hpp"

namespace namekit {

Eigen::MatrixXd embed_sequence(const TokenSeq& seq, const EmbeddingMatrix& emb,
                               const Vocabulary& vocab) {
    if (vocab.size() != emb.vocab_size())
        throw DimensionMismatch("embedding rows do not match the vocabulary");
    Eigen::MatrixXd out(seq.tokens.size(), emb.dim());
    for (std::size_t t = 0; t < seq.tokens.size(); ++t) {
        out.row(t) = emb.rows.row(vocab.lookup(seq.tokens[t]));
    }
    return out;
}

std::size_t nearest_token(const Eigen::VectorXd& v, const EmbeddingMatrix& emb) {
    const std::size_t n = emb.vocab_size();
    if (n <= kEonIndex + 1) throw DegenerateCorpus("no non-special embedding rows");
    double vnorm = v.norm();
    std::size_t best = kEonIndex + 1;
    double best_sim = -2.0;  // cosine lives in [-1, 1]
    for (std::size_t i = kEonIndex + 1; i < n; ++i) {
        double rnorm = emb.rows.row(i).norm();
        if (vnorm == 0.0 || rnorm == 0.0) continue;
        double sim = emb.rows.row(i).dot(v) / (rnorm * vnorm);
        if (sim > best_sim) {
            best_sim = sim;
            best = i;
        }
    }
    return best;
}

}  // namespace namekit
