#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "namekit/rng.hpp"

namespace namekit {

// Two-channel convolutional consistency checker. Both channels are length x
// embed matrices: the decoder's reconstruction of the method and the embedded
// existing name. Two valid stride-1 convolutions of width 3 feed a global
// max-pool, a dense layer and a two-way softmax. Class 1 means inconsistent.
struct CheckerParams {
    int length = 0;
    int embed_dim = 0;
    Eigen::MatrixXd k1;  // 16 x (2 * 3 * embed)
    Eigen::VectorXd b1;  // 16
    Eigen::MatrixXd k2;  // 32 x (16 * 3)
    Eigen::VectorXd b2;  // 32
    Eigen::MatrixXd wd;  // 2 x 32
    Eigen::VectorXd bd;  // 2

    static CheckerParams init(int length, int embed_dim, std::uint64_t seed,
                              double scale = 0.08);
};

struct CheckerGrads {
    Eigen::MatrixXd k1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd k2;
    Eigen::VectorXd b2;
    Eigen::MatrixXd wd;
    Eigen::VectorXd bd;

    static CheckerGrads zeros_like(const CheckerParams& p);
    void set_zero();
};

struct CheckExample {
    Eigen::MatrixXd current;  // length x embed, decoder reconstruction, zero padded
    Eigen::MatrixXd name;     // length x embed, embedded existing name, zero padded
    int label = 0;            // 0 consistent, 1 inconsistent
};

// probability that the pair is inconsistent
double checker_forward(const CheckerParams& p, const Eigen::MatrixXd& current,
                       const Eigen::MatrixXd& name);

double checker_loss(const CheckerParams& p, const CheckExample& ex);

double checker_loss_and_grad(const CheckerParams& p, const CheckExample& ex,
                             CheckerGrads& grads);

struct CheckerTrainConfig {
    std::size_t epochs = 200;
    double lr = 0.05;
    double momentum = 0.9;
    double clip_norm = 5.0;
    double target_loss = 0.0;
};

// Full-batch gradient descent with momentum; deterministic. Returns the mean
// cross entropy per epoch.
std::vector<double> train_checker(CheckerParams& params, const std::vector<CheckExample>& data,
                                  const CheckerTrainConfig& tc);

double checker_grad_check(CheckerParams& params, const CheckExample& ex, double eps = 1e-5);

}  // namespace namekit
