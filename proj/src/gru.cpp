#include "namekit/gru.hpp"

#include "namekit/errors.hpp"

namespace namekit {
namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& a) {
    return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

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

GruParams GruParams::init(int input, int hidden, Rng& rng, double scale) {
    GruParams p;
    p.w_z = random_matrix(hidden, input, rng, scale);
    p.w_r = random_matrix(hidden, input, rng, scale);
    p.w_c = random_matrix(hidden, input, rng, scale);
    p.u_z = random_matrix(hidden, hidden, rng, scale);
    p.u_r = random_matrix(hidden, hidden, rng, scale);
    p.u_c = random_matrix(hidden, hidden, rng, scale);
    p.b_z = Eigen::VectorXd::Zero(hidden);
    p.b_r = Eigen::VectorXd::Zero(hidden);
    p.b_c = Eigen::VectorXd::Zero(hidden);
    return p;
}

GruParams GruParams::zeros(int input, int hidden) {
    GruParams p;
    p.w_z = Eigen::MatrixXd::Zero(hidden, input);
    p.w_r = Eigen::MatrixXd::Zero(hidden, input);
    p.w_c = Eigen::MatrixXd::Zero(hidden, input);
    p.u_z = Eigen::MatrixXd::Zero(hidden, hidden);
    p.u_r = Eigen::MatrixXd::Zero(hidden, hidden);
    p.u_c = Eigen::MatrixXd::Zero(hidden, hidden);
    p.b_z = Eigen::VectorXd::Zero(hidden);
    p.b_r = Eigen::VectorXd::Zero(hidden);
    p.b_c = Eigen::VectorXd::Zero(hidden);
    return p;
}

Eigen::VectorXd gru_step(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                         const GruParams& p, GruStepCache* cache) {
    if (x.size() != p.input_dim() || h_prev.size() != p.hidden_dim()) {
        throw DimensionMismatch("gru_step: input/state size does not match parameters");
    }
    Eigen::VectorXd z = sigmoid(p.w_z * x + p.u_z * h_prev + p.b_z);
    Eigen::VectorXd r = sigmoid(p.w_r * x + p.u_r * h_prev + p.b_r);
    Eigen::VectorXd c = (p.w_c * x + p.u_c * (r.array() * h_prev.array()).matrix() + p.b_c)
                            .array()
                            .tanh()
                            .matrix();
    Eigen::VectorXd h = ((1.0 - z.array()) * h_prev.array() + z.array() * c.array()).matrix();
    if (cache != nullptr) {
        cache->x = x;
        cache->h_prev = h_prev;
        cache->z = z;
        cache->r = r;
        cache->c = c;
    }
    return h;
}

void gru_step_backward(const Eigen::VectorXd& dh, const GruStepCache& cache,
                       const GruParams& p, GruParams& grads,
                       Eigen::VectorXd& dh_prev, Eigen::VectorXd& dx) {
    const auto& z = cache.z;
    const auto& r = cache.r;
    const auto& c = cache.c;
    const auto& h_prev = cache.h_prev;

    Eigen::VectorXd dz = (dh.array() * (c - h_prev).array()).matrix();
    Eigen::VectorXd dc = (dh.array() * z.array()).matrix();
    dh_prev = (dh.array() * (1.0 - z.array())).matrix();

    // candidate pre-activation
    Eigen::VectorXd da_c = (dc.array() * (1.0 - c.array().square())).matrix();
    Eigen::VectorXd rh = (r.array() * h_prev.array()).matrix();
    grads.w_c += da_c * cache.x.transpose();
    grads.u_c += da_c * rh.transpose();
    grads.b_c += da_c;
    Eigen::VectorXd drh = p.u_c.transpose() * da_c;
    Eigen::VectorXd dr = (drh.array() * h_prev.array()).matrix();
    dh_prev += (drh.array() * r.array()).matrix();

    // gate pre-activations
    Eigen::VectorXd da_z = (dz.array() * z.array() * (1.0 - z.array())).matrix();
    Eigen::VectorXd da_r = (dr.array() * r.array() * (1.0 - r.array())).matrix();
    grads.w_z += da_z * cache.x.transpose();
    grads.u_z += da_z * h_prev.transpose();
    grads.b_z += da_z;
    grads.w_r += da_r * cache.x.transpose();
    grads.u_r += da_r * h_prev.transpose();
    grads.b_r += da_r;

    dh_prev += p.u_z.transpose() * da_z + p.u_r.transpose() * da_r;
    dx = p.w_z.transpose() * da_z + p.w_r.transpose() * da_r + p.w_c.transpose() * da_c;
}

}  // namespace namekit
