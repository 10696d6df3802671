#include "namekit/glove.hpp"

#include <cmath>
#include <set>

#include "namekit/errors.hpp"
#include "namekit/rng.hpp"
#include "namekit/specials.hpp"

namespace namekit {

namespace {

struct Cell {
    std::size_t i, j;
    double x;
};

// Both orientations of every off-diagonal cell, diagonals once, key order.
std::vector<Cell> expand_cells(const CooccurrenceTable& table) {
    std::vector<Cell> cells;
    cells.reserve(table.cells().size() * 2);
    for (const auto& [key, numerator] : table.cells()) {
        double x = static_cast<double>(numerator) / static_cast<double>(table.scale());
        cells.push_back({key.first, key.second, x});
        if (key.first != key.second) cells.push_back({key.second, key.first, x});
    }
    return cells;
}

double weight_of(double x, const GloveConfig& cfg) {
    double w = std::pow(x / cfg.x_max, cfg.alpha);
    return w < 1.0 ? w : 1.0;
}

}  // namespace

double glove_objective(const GloveParams& p, const CooccurrenceTable& table,
                       const GloveConfig& cfg) {
    double total = 0.0;
    for (const Cell& c : expand_cells(table)) {
        double diff = p.w.row(c.i).dot(p.w_tilde.row(c.j)) + p.b(c.i) + p.b_tilde(c.j) -
                      std::log(c.x);
        total += weight_of(c.x, cfg) * diff * diff;
    }
    return total;
}

GloveParams glove_gradient(const GloveParams& p, const CooccurrenceTable& table,
                           const GloveConfig& cfg) {
    GloveParams g;
    g.w = Eigen::MatrixXd::Zero(p.w.rows(), p.w.cols());
    g.w_tilde = Eigen::MatrixXd::Zero(p.w.rows(), p.w.cols());
    g.b = Eigen::VectorXd::Zero(p.b.size());
    g.b_tilde = Eigen::VectorXd::Zero(p.b.size());
    for (const Cell& c : expand_cells(table)) {
        double diff = p.w.row(c.i).dot(p.w_tilde.row(c.j)) + p.b(c.i) + p.b_tilde(c.j) -
                      std::log(c.x);
        double scale = 2.0 * weight_of(c.x, cfg) * diff;
        g.w.row(c.i) += scale * p.w_tilde.row(c.j);
        g.w_tilde.row(c.j) += scale * p.w.row(c.i);
        g.b(c.i) += scale;
        g.b_tilde(c.j) += scale;
    }
    return g;
}

EmbeddingMatrix train_embeddings(const CooccurrenceTable& table, std::size_t vocab_size,
                                 const GloveConfig& cfg,
                                 std::vector<double>* per_epoch_objective) {
    if (table.empty()) throw DegenerateCorpus("empty co-occurrence table");
    if (cfg.dim < 2) throw ConfigError("embedding dim must be at least 2");

    std::set<std::size_t> distinct;
    for (const auto& [key, numerator] : table.cells()) {
        (void)numerator;
        distinct.insert(key.first);
        distinct.insert(key.second);
        if (key.first >= vocab_size || key.second >= vocab_size)
            throw DimensionMismatch("co-occurrence index outside the vocabulary");
    }
    if (distinct.size() < 2) throw DegenerateCorpus("fewer than 2 distinct tokens");

    const int d = cfg.dim;
    Rng rng(cfg.seed);
    GloveParams p;
    p.w.resize(vocab_size, d);
    p.w_tilde.resize(vocab_size, d);
    for (std::size_t r = 0; r < vocab_size; ++r) {
        for (int c = 0; c < d; ++c) {
            p.w(r, c) = rng.uniform(-0.5, 0.5) / d;
            p.w_tilde(r, c) = rng.uniform(-0.5, 0.5) / d;
        }
    }
    p.b = Eigen::VectorXd::Zero(vocab_size);
    p.b_tilde = Eigen::VectorXd::Zero(vocab_size);

    // AdaGrad accumulators start at 1 so the first steps are plain SGD.
    Eigen::MatrixXd acc_w = Eigen::MatrixXd::Ones(vocab_size, d);
    Eigen::MatrixXd acc_wt = Eigen::MatrixXd::Ones(vocab_size, d);
    Eigen::VectorXd acc_b = Eigen::VectorXd::Ones(vocab_size);
    Eigen::VectorXd acc_bt = Eigen::VectorXd::Ones(vocab_size);

    std::vector<Cell> cells = expand_cells(table);
    Eigen::VectorXd grad_w(d), grad_wt(d);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(cells);
        double epoch_cost = 0.0;
        for (const Cell& c : cells) {
            double diff = p.w.row(c.i).dot(p.w_tilde.row(c.j)) + p.b(c.i) +
                          p.b_tilde(c.j) - std::log(c.x);
            double fx = weight_of(c.x, cfg);
            epoch_cost += fx * diff * diff;
            double scale = 2.0 * fx * diff;

            grad_w = scale * p.w_tilde.row(c.j).transpose();
            grad_wt = scale * p.w.row(c.i).transpose();
            for (int k = 0; k < d; ++k) {
                p.w(c.i, k) -= cfg.lr * grad_w(k) / std::sqrt(acc_w(c.i, k));
                acc_w(c.i, k) += grad_w(k) * grad_w(k);
                p.w_tilde(c.j, k) -= cfg.lr * grad_wt(k) / std::sqrt(acc_wt(c.j, k));
                acc_wt(c.j, k) += grad_wt(k) * grad_wt(k);
            }
            p.b(c.i) -= cfg.lr * scale / std::sqrt(acc_b(c.i));
            acc_b(c.i) += scale * scale;
            p.b_tilde(c.j) -= cfg.lr * scale / std::sqrt(acc_bt(c.j));
            acc_bt(c.j) += scale * scale;

            if (!std::isfinite(diff)) throw NonFiniteLoss("embedding objective diverged");
        }
        if (per_epoch_objective)
            per_epoch_objective->push_back(epoch_cost / static_cast<double>(cells.size()));
    }

    EmbeddingMatrix emb;
    emb.rows = p.w + p.w_tilde;
    emb.rows.row(kPadIndex).setZero();
    return emb;
}

}  // namespace namekit
