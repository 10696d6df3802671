#include "namekit/attention.hpp"

#include <cmath>
#include <limits>

#include "namekit/errors.hpp"

namespace namekit {
namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng, double scale) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            m(i, j) = rng.uniform(-scale, scale);
        }
    }
    return m;
}

}  // namespace

AttentionParams AttentionParams::init(int hidden, int attn, Rng& rng, double scale) {
    AttentionParams p;
    p.w = random_matrix(attn, 2 * hidden, rng, scale);
    p.b = Eigen::VectorXd::Zero(attn);
    p.v = random_matrix(attn, 1, rng, scale).col(0);
    return p;
}

AttentionParams AttentionParams::zeros(int hidden, int attn) {
    AttentionParams p;
    p.w = Eigen::MatrixXd::Zero(attn, 2 * hidden);
    p.b = Eigen::VectorXd::Zero(attn);
    p.v = Eigen::VectorXd::Zero(attn);
    return p;
}

Eigen::VectorXd attend(const Eigen::VectorXd& query, const Eigen::MatrixXd& states,
                       const std::vector<std::uint8_t>& masked, const AttentionParams& p,
                       AttendCache* cache) {
    const Eigen::Index rows = states.rows();
    const Eigen::Index hidden = states.cols();
    if (static_cast<Eigen::Index>(masked.size()) != rows) {
        throw DimensionMismatch("attend: mask length does not match memory rows");
    }
    if (query.size() != hidden || p.w.cols() != 2 * hidden) {
        throw DimensionMismatch("attend: query/parameter width does not match memory");
    }

    const Eigen::Index attn = p.w.rows();
    Eigen::MatrixXd acts = Eigen::MatrixXd::Zero(rows, attn);
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(rows);
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (masked[static_cast<std::size_t>(i)]) continue;
        Eigen::VectorXd joined(2 * hidden);
        joined << query, states.row(i).transpose();
        Eigen::VectorXd a = (p.w * joined + p.b).array().tanh().matrix();
        acts.row(i) = a.transpose();
        scores(i) = p.v.dot(a);
        best = std::max(best, scores(i));
        any = true;
    }
    if (!any) {
        throw AllMasked("attend: every memory position is padding");
    }

    Eigen::VectorXd weights = Eigen::VectorXd::Zero(rows);
    double total = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (masked[static_cast<std::size_t>(i)]) continue;
        weights(i) = std::exp(scores(i) - best);
        total += weights(i);
    }
    weights /= total;

    Eigen::VectorXd context = states.transpose() * weights;
    if (cache != nullptr) {
        cache->query = query;
        cache->acts = std::move(acts);
        cache->weights = weights;
    }
    return context;
}

void attend_backward(const Eigen::VectorXd& d_context, const AttendCache& cache,
                     const Eigen::MatrixXd& states, const std::vector<std::uint8_t>& masked,
                     const AttentionParams& p, AttentionParams& grads,
                     Eigen::VectorXd& d_query, Eigen::MatrixXd& d_states) {
    const Eigen::Index rows = states.rows();
    const Eigen::Index hidden = states.cols();
    const auto& alpha = cache.weights;

    d_query = Eigen::VectorXd::Zero(hidden);

    // context = sum_i alpha_i h_i
    Eigen::VectorXd d_alpha = states * d_context;
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (masked[static_cast<std::size_t>(i)]) continue;
        d_states.row(i) += alpha(i) * d_context.transpose();
    }

    // softmax over unmasked rows
    double dot = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (!masked[static_cast<std::size_t>(i)]) dot += alpha(i) * d_alpha(i);
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (masked[static_cast<std::size_t>(i)]) continue;
        double d_score = alpha(i) * (d_alpha(i) - dot);
        Eigen::VectorXd a = cache.acts.row(i).transpose();
        grads.v += d_score * a;
        Eigen::VectorXd d_pre =
            ((d_score * p.v).array() * (1.0 - a.array().square())).matrix();
        Eigen::VectorXd joined(2 * hidden);
        joined << cache.query, states.row(i).transpose();
        grads.w += d_pre * joined.transpose();
        grads.b += d_pre;
        Eigen::VectorXd d_joined = p.w.transpose() * d_pre;
        d_query += d_joined.head(hidden);
        d_states.row(i) += d_joined.tail(hidden).transpose();
    }
}

}  // namespace namekit
