// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "dqcr/rng.hpp"

namespace dqcr {

struct MlpShape {
  int input = 0;
  int hidden1 = 150;
  int hidden2 = 140;
  int output = 0;

  friend bool operator==(const MlpShape&, const MlpShape&) = default;
};

// Parameters (or gradients) of a two-hidden-layer ReLU network.
struct MlpParams {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;

  static MlpParams zeros(const MlpShape& shape);
  MlpShape shape() const;
  bool all_finite() const;
  Eigen::Index size() const { return w1.size() + w2.size() + w3.size() + b1.size() + b2.size() + b3.size(); }

  // Visits every scalar in a fixed order (w1, b1, w2, b2, w3, b3).
  template <typename F>
  void for_each(F&& f) {
    for (Eigen::Index k = 0; k < w1.size(); ++k) f(w1.data()[k]);
    for (Eigen::Index k = 0; k < b1.size(); ++k) f(b1.data()[k]);
    for (Eigen::Index k = 0; k < w2.size(); ++k) f(w2.data()[k]);
    for (Eigen::Index k = 0; k < b2.size(); ++k) f(b2.data()[k]);
    for (Eigen::Index k = 0; k < w3.size(); ++k) f(w3.data()[k]);
    for (Eigen::Index k = 0; k < b3.size(); ++k) f(b3.data()[k]);
  }
};

// Activations kept from a forward pass for backpropagation. Columns are
// samples.
struct MlpCache {
  Eigen::MatrixXd input, z1, a1, z2, a2;
};

class Mlp {
 public:
  Mlp() = default;
  // Weights and biases uniform in +-1/sqrt(fan_in).
  Mlp(const MlpShape& shape, Rng& rng);
  explicit Mlp(MlpParams params);

  const MlpShape& shape() const { return shape_; }
  const MlpParams& params() const { return params_; }
  MlpParams& params() { return params_; }

  // Throws ContractViolation on input dimension mismatch.
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& batch, MlpCache* cache = nullptr) const;

  // Gradients of sum(d_out .* output) w.r.t. the parameters.
  MlpParams backward(const MlpCache& cache, const Eigen::MatrixXd& d_out) const;

  // target <- tau * main + (1 - tau) * target
  void soft_update_from(const Mlp& main, double tau);

 private:
  MlpShape shape_;
  MlpParams params_;
};

// Adaptive moment estimation over MlpParams.
class Adam {
 public:
  Adam() = default;
  Adam(const MlpShape& shape, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(MlpParams& params, const MlpParams& grads);
  long steps() const { return t_; }

 private:
  double lr_ = 1e-5, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
  MlpParams m_, v_;
};

}  // namespace dqcr
