#include "namekit/cnn.hpp"

#include <algorithm>
#include <cmath>

#include "namekit/errors.hpp"
#include "namekit/parallel.hpp"

namespace namekit {
namespace {

constexpr int kC1 = 16;
constexpr int kC2 = 32;
constexpr int kWidth = 3;
constexpr std::size_t kBatchBlock = 8;

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng, double scale) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
    }
    return m;
}

struct ForwardCache {
    Eigen::MatrixXd patches1;  // n1 x (2*3*embed)
    Eigen::MatrixXd r1;        // n1 x 16
    Eigen::MatrixXd r2;        // n2 x 32
    std::vector<int> argmax;   // 32, pooled row per channel
    Eigen::VectorXd pooled;    // 32
    Eigen::Vector2d probs;
};

void forward(const CheckerParams& p, const Eigen::MatrixXd& current,
             const Eigen::MatrixXd& name, ForwardCache& c) {
    if (current.rows() != p.length || current.cols() != p.embed_dim ||
        name.rows() != p.length || name.cols() != p.embed_dim) {
        throw DimensionMismatch("checker: input pair does not match the configured shape");
    }
    const int n1 = p.length - kWidth + 1;
    const int n2 = n1 - kWidth + 1;
    const int d = p.embed_dim;

    c.patches1.resize(n1, 2 * kWidth * d);
    for (int q = 0; q < n1; ++q) {
        for (int w = 0; w < kWidth; ++w) {
            c.patches1.row(q).segment(w * d, d) = current.row(q + w);
            c.patches1.row(q).segment((kWidth + w) * d, d) = name.row(q + w);
        }
    }
    c.r1 = ((c.patches1 * p.k1.transpose()).rowwise() + p.b1.transpose()).cwiseMax(0.0);

    c.r2.resize(n2, kC2);
    for (int q = 0; q < n2; ++q) {
        Eigen::VectorXd patch(kC1 * kWidth);
        for (int w = 0; w < kWidth; ++w) {
            patch.segment(w * kC1, kC1) = c.r1.row(q + w).transpose();
        }
        c.r2.row(q) = ((p.k2 * patch + p.b2).cwiseMax(0.0)).transpose();
    }

    c.argmax.assign(kC2, 0);
    c.pooled.resize(kC2);
    for (int ch = 0; ch < kC2; ++ch) {
        int best = 0;
        for (int q = 1; q < n2; ++q) {
            if (c.r2(q, ch) > c.r2(best, ch)) best = q;
        }
        c.argmax[static_cast<std::size_t>(ch)] = best;
        c.pooled(ch) = c.r2(best, ch);
    }

    Eigen::Vector2d logits = p.wd * c.pooled + p.bd;
    const double shift = logits.maxCoeff();
    Eigen::Vector2d e = (logits.array() - shift).exp();
    c.probs = e / e.sum();
}

}  // namespace

CheckerParams CheckerParams::init(int length, int embed_dim, std::uint64_t seed, double scale) {
    if (length < 2 * kWidth - 1) {
        throw ConfigError("checker: padded length must be at least 5 for two width-3 passes");
    }
    if (embed_dim < 1) {
        throw ConfigError("checker: embedding width must be positive");
    }
    CheckerParams p;
    p.length = length;
    p.embed_dim = embed_dim;
    Rng rng(seed);
    p.k1 = random_matrix(kC1, 2 * kWidth * embed_dim, rng, scale);
    p.b1 = Eigen::VectorXd::Zero(kC1);
    p.k2 = random_matrix(kC2, kC1 * kWidth, rng, scale);
    p.b2 = Eigen::VectorXd::Zero(kC2);
    p.wd = random_matrix(2, kC2, rng, scale);
    p.bd = Eigen::VectorXd::Zero(2);
    return p;
}

CheckerGrads CheckerGrads::zeros_like(const CheckerParams& p) {
    CheckerGrads g;
    g.k1 = Eigen::MatrixXd::Zero(p.k1.rows(), p.k1.cols());
    g.b1 = Eigen::VectorXd::Zero(p.b1.size());
    g.k2 = Eigen::MatrixXd::Zero(p.k2.rows(), p.k2.cols());
    g.b2 = Eigen::VectorXd::Zero(p.b2.size());
    g.wd = Eigen::MatrixXd::Zero(p.wd.rows(), p.wd.cols());
    g.bd = Eigen::VectorXd::Zero(p.bd.size());
    return g;
}

void CheckerGrads::set_zero() {
    k1.setZero();
    b1.setZero();
    k2.setZero();
    b2.setZero();
    wd.setZero();
    bd.setZero();
}

double checker_forward(const CheckerParams& p, const Eigen::MatrixXd& current,
                       const Eigen::MatrixXd& name) {
    ForwardCache c;
    forward(p, current, name, c);
    return c.probs(1);
}

double checker_loss(const CheckerParams& p, const CheckExample& ex) {
    ForwardCache c;
    forward(p, ex.current, ex.name, c);
    return -std::log(c.probs(ex.label) + 1e-12);
}

double checker_loss_and_grad(const CheckerParams& p, const CheckExample& ex,
                             CheckerGrads& grads) {
    ForwardCache c;
    forward(p, ex.current, ex.name, c);
    const double loss = -std::log(c.probs(ex.label) + 1e-12);

    Eigen::Vector2d d_logits = c.probs;
    d_logits(ex.label) -= 1.0;

    grads.wd += d_logits * c.pooled.transpose();
    grads.bd += d_logits;
    Eigen::VectorXd d_pooled = p.wd.transpose() * d_logits;

    const int n1 = p.length - kWidth + 1;
    const int n2 = n1 - kWidth + 1;
    Eigen::MatrixXd d_r2 = Eigen::MatrixXd::Zero(n2, kC2);
    for (int ch = 0; ch < kC2; ++ch) {
        d_r2(c.argmax[static_cast<std::size_t>(ch)], ch) = d_pooled(ch);
    }

    Eigen::MatrixXd d_r1 = Eigen::MatrixXd::Zero(n1, kC1);
    for (int q = 0; q < n2; ++q) {
        Eigen::VectorXd d_a2 =
            (d_r2.row(q).transpose().array() * (c.r2.row(q).transpose().array() > 0.0).cast<double>())
                .matrix();
        if (d_a2.isZero(0.0)) continue;
        Eigen::VectorXd patch(kC1 * kWidth);
        for (int w = 0; w < kWidth; ++w) {
            patch.segment(w * kC1, kC1) = c.r1.row(q + w).transpose();
        }
        grads.k2 += d_a2 * patch.transpose();
        grads.b2 += d_a2;
        Eigen::VectorXd d_patch = p.k2.transpose() * d_a2;
        for (int w = 0; w < kWidth; ++w) {
            d_r1.row(q + w) += d_patch.segment(w * kC1, kC1).transpose();
        }
    }

    for (int q = 0; q < n1; ++q) {
        Eigen::VectorXd d_a1 =
            (d_r1.row(q).transpose().array() * (c.r1.row(q).transpose().array() > 0.0).cast<double>())
                .matrix();
        if (d_a1.isZero(0.0)) continue;
        grads.k1 += d_a1 * c.patches1.row(q);
        grads.b1 += d_a1;
    }
    return loss;
}

namespace {

template <class Fn>
void for_each_pair(CheckerGrads& a, CheckerGrads& b, Fn&& fn) {
    fn(a.k1, b.k1);
    fn(a.b1, b.b1);
    fn(a.k2, b.k2);
    fn(a.b2, b.b2);
    fn(a.wd, b.wd);
    fn(a.bd, b.bd);
}

}  // namespace

std::vector<double> train_checker(CheckerParams& params, const std::vector<CheckExample>& data,
                                  const CheckerTrainConfig& tc) {
    if (data.empty()) {
        throw DegenerateCorpus("train_checker: no labelled pairs");
    }
    if (tc.lr <= 0.0 || tc.clip_norm <= 0.0) {
        throw ConfigError("train_checker: learning rate and clip norm must be positive");
    }
    const std::size_t n = data.size();
    const std::size_t blocks = (n + kBatchBlock - 1) / kBatchBlock;
    std::vector<CheckerGrads> block_grads(blocks, CheckerGrads::zeros_like(params));
    std::vector<double> block_loss(blocks, 0.0);
    CheckerGrads total = CheckerGrads::zeros_like(params);
    CheckerGrads velocity = CheckerGrads::zeros_like(params);

    std::vector<double> losses;
    losses.reserve(tc.epochs);
    for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
        parallel_for(blocks, [&](std::size_t b) {
            block_grads[b].set_zero();
            block_loss[b] = 0.0;
            const std::size_t lo = b * kBatchBlock;
            const std::size_t hi = std::min(n, lo + kBatchBlock);
            for (std::size_t i = lo; i < hi; ++i) {
                block_loss[b] += checker_loss_and_grad(params, data[i], block_grads[b]);
            }
        });
        total.set_zero();
        double loss = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
            for_each_pair(total, block_grads[b],
                          [](auto& dst, const auto& src) { dst += src; });
            loss += block_loss[b];
        }
        loss /= static_cast<double>(n);
        if (!std::isfinite(loss)) {
            throw NonFiniteLoss("train_checker: loss diverged at epoch " + std::to_string(epoch));
        }
        // mean over examples, then global norm clipping
        double sq = 0.0;
        for_each_pair(total, total, [&](auto& dst, const auto&) {
            dst *= 1.0 / static_cast<double>(n);
            sq += dst.squaredNorm();
        });
        const double norm = std::sqrt(sq);
        if (norm > tc.clip_norm) {
            const double s = tc.clip_norm / norm;
            for_each_pair(total, total, [&](auto& dst, const auto&) { dst *= s; });
        }
        for_each_pair(velocity, total, [&](auto& vel, const auto& g) {
            vel = tc.momentum * vel - tc.lr * g;
        });
        params.k1 += velocity.k1;
        params.b1 += velocity.b1;
        params.k2 += velocity.k2;
        params.b2 += velocity.b2;
        params.wd += velocity.wd;
        params.bd += velocity.bd;

        losses.push_back(loss);
        if (loss <= tc.target_loss) break;
    }
    return losses;
}

double checker_grad_check(CheckerParams& params, const CheckExample& ex, double eps) {
    CheckerGrads analytic = CheckerGrads::zeros_like(params);
    checker_loss_and_grad(params, ex, analytic);

    double worst = 0.0;
    auto probe = [&](auto& param, const auto& grad) {
        for (Eigen::Index i = 0; i < param.rows(); ++i) {
            for (Eigen::Index j = 0; j < param.cols(); ++j) {
                const double saved = param(i, j);
                param(i, j) = saved + eps;
                const double up = checker_loss(params, ex);
                param(i, j) = saved - eps;
                const double down = checker_loss(params, ex);
                param(i, j) = saved;
                const double numeric = (up - down) / (2.0 * eps);
                const double a = grad(i, j);
                worst = std::max(worst,
                                 std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-3));
            }
        }
    };
    probe(params.k1, analytic.k1);
    probe(params.b1, analytic.b1);
    probe(params.k2, analytic.k2);
    probe(params.b2, analytic.b2);
    probe(params.wd, analytic.wd);
    probe(params.bd, analytic.bd);
    return worst;
}

}  // namespace namekit
