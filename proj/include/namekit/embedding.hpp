#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "namekit/context.hpp"
#include "namekit/vocab.hpp"

namespace namekit {

// |V| x d, row per vocabulary index. Row 0 (PAD) is all zeros.
struct EmbeddingMatrix {
    Eigen::MatrixXd rows;

    int dim() const { return static_cast<int>(rows.cols()); }
    std::size_t vocab_size() const { return static_cast<std::size_t>(rows.rows()); }
};

// Replaces tokens with their vectors, preserving order. PAD maps to the zero
// row, out-of-vocabulary tokens to the UNK row. Returns an L x d matrix.
Eigen::MatrixXd embed_sequence(const TokenSeq& seq, const EmbeddingMatrix& emb,
                               const Vocabulary& vocab);

// Index of the non-special row with the highest cosine similarity to v; ties
// break toward the lowest index. Rows (or v) with zero norm never win; if
// nothing is comparable the lowest non-special index is returned.
std::size_t nearest_token(const Eigen::VectorXd& v, const EmbeddingMatrix& emb);

}  // namespace namekit
