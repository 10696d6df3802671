#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "namekit/cooccurrence.hpp"
#include "namekit/embedding.hpp"

namespace namekit {

struct GloveConfig {
    int dim = 32;
    int window = 5;  // co-occurrence window fed to build_cooccurrence
    int epochs = 50;
    double lr = 0.05;
    double x_max = 100.0;
    double alpha = 0.75;
    std::uint64_t seed = 1;
};

// Factor parameters: main and context vectors plus both bias sets.
struct GloveParams {
    Eigen::MatrixXd w;        // |V| x d
    Eigen::MatrixXd w_tilde;  // |V| x d
    Eigen::VectorXd b;
    Eigen::VectorXd b_tilde;
};

// Weighted least-squares objective over all non-zero cells (both orientations
// of each off-diagonal cell), with f(x) = min((x/x_max)^alpha, 1).
double glove_objective(const GloveParams& p, const CooccurrenceTable& table,
                       const GloveConfig& cfg);

// Analytic gradient of glove_objective; used by the finite-difference test.
GloveParams glove_gradient(const GloveParams& p, const CooccurrenceTable& table,
                           const GloveConfig& cfg);

// AdaGrad descent on the objective, pair order reshuffled per epoch with a
// seeded generator. Returns w + w_tilde with the PAD row forced to zero.
// per_epoch_objective, when given, receives the mean per-cell objective after
// each epoch. Single-threaded by contract so runs are reproducible.
EmbeddingMatrix train_embeddings(const CooccurrenceTable& table, std::size_t vocab_size,
                                 const GloveConfig& cfg,
                                 std::vector<double>* per_epoch_objective = nullptr);

}  // namespace namekit
