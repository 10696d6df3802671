#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "namekit/cnn.hpp"
#include "namekit/model.hpp"

namespace namekit {

// Greedy reconstruction of a method body as a sequence of sub-token
// embedding vectors, one per emitted step, terminator excluded.
struct MethodRepresentation {
    Eigen::MatrixXd vectors;          // steps x embed
    std::vector<std::string> tokens;  // emitted sub-tokens
    bool empty = false;               // terminator surfaced at the first step
};

MethodRepresentation represent_method(const ModelParams& params, const EncodedBundle& enc,
                                      const EmbeddingMatrix& emb, const Vocabulary& vocab);

// Zero-pads (or head-truncates) a row matrix to exactly `length` rows; the
// shape both checker channels are brought to.
Eigen::MatrixXd pad_rows(const Eigen::MatrixXd& m, int length);

// One embedding row per sub-token, out-of-vocabulary tokens on the UNK row.
Eigen::MatrixXd embed_name(const std::vector<std::string>& subtokens,
                           const EmbeddingMatrix& emb, const Vocabulary& vocab);

struct CheckResult {
    double p_inconsistent = 0.0;
    bool inconsistent = false;
    bool empty_representation = false;
};

// Pairs the decoder's reconstruction with the embedded existing name and runs
// the convolutional checker. Throws EmptyName when the name has no sub-tokens.
CheckResult check_consistency(const ModelParams& params, const CheckerParams& checker,
                              const EncodedBundle& enc,
                              const std::vector<std::string>& name_subtokens,
                              const EmbeddingMatrix& emb, const Vocabulary& vocab);

struct Suggestion {
    std::vector<std::string> tokens;
    std::string rendered;  // camelCase form
    double score = 0.0;    // length-normalized log probability
};

// Top-k name suggestions. Runs the beam at the configured width regardless of
// k and slices, so the list for a smaller k is a prefix of a larger one.
// Emitted vocabulary tokens are rolled back through the embedding table;
// tokens copied from outside the vocabulary are kept verbatim.
std::vector<Suggestion> suggest_name(const ModelParams& params, const EncodedBundle& enc,
                                     const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                     std::size_t k);

}  // namespace namekit
