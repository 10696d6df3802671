#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "namekit/rng.hpp"

namespace namekit {

// Additive attention over a pooled memory of encoder states.
// score_i = v . tanh(w [query; h_i] + b), softmax over unmasked rows only.
struct AttentionParams {
    Eigen::MatrixXd w;  // attn x (2 * hidden)
    Eigen::VectorXd b;  // attn
    Eigen::VectorXd v;  // attn

    int hidden_dim() const { return static_cast<int>(w.cols()) / 2; }

    static AttentionParams init(int hidden, int attn, Rng& rng, double scale);
    static AttentionParams zeros(int hidden, int attn);
};

struct AttendCache {
    Eigen::VectorXd query;
    Eigen::MatrixXd acts;    // rows x attn, tanh activations; masked rows zero
    Eigen::VectorXd weights; // rows, softmax weights; masked rows zero
};

// states: rows x hidden, one row per memory position. Throws AllMasked when no
// position is attendable. Returns the weighted sum of unmasked states.
Eigen::VectorXd attend(const Eigen::VectorXd& query, const Eigen::MatrixXd& states,
                       const std::vector<std::uint8_t>& masked, const AttentionParams& p,
                       AttendCache* cache = nullptr);

void attend_backward(const Eigen::VectorXd& d_context, const AttendCache& cache,
                     const Eigen::MatrixXd& states, const std::vector<std::uint8_t>& masked,
                     const AttentionParams& p, AttentionParams& grads,
                     Eigen::VectorXd& d_query, Eigen::MatrixXd& d_states);

}  // namespace namekit
