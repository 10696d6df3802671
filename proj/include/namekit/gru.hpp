#pragma once

#include <Eigen/Dense>

#include "namekit/rng.hpp"

namespace namekit {

// Gated recurrent unit:
//   z = sigmoid(w_z x + u_z h + b_z)
//   r = sigmoid(w_r x + u_r h + b_r)
//   c = tanh(w_c x + u_c (r .* h) + b_c)
//   h' = (1 - z) .* h + z .* c
struct GruParams {
    Eigen::MatrixXd w_z, w_r, w_c;  // hidden x input
    Eigen::MatrixXd u_z, u_r, u_c;  // hidden x hidden
    Eigen::VectorXd b_z, b_r, b_c;  // hidden

    int input_dim() const { return static_cast<int>(w_z.cols()); }
    int hidden_dim() const { return static_cast<int>(w_z.rows()); }

    static GruParams init(int input, int hidden, Rng& rng, double scale);
    static GruParams zeros(int input, int hidden);
};

// Everything the backward pass needs from one forward step.
struct GruStepCache {
    Eigen::VectorXd x, h_prev, z, r, c;
};

Eigen::VectorXd gru_step(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                         const GruParams& p, GruStepCache* cache = nullptr);

// Adds this step's parameter gradients into `grads` and writes the gradients
// flowing to the inputs. dh is dLoss/dh' for the step's output.
void gru_step_backward(const Eigen::VectorXd& dh, const GruStepCache& cache,
                       const GruParams& p, GruParams& grads,
                       Eigen::VectorXd& dh_prev, Eigen::VectorXd& dx);

}  // namespace namekit
