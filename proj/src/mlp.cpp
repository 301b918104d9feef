// SPDX-License-Identifier: Apache-2.0
#include "dqcr/mlp.hpp"

#include <cmath>
#include <string>

#include "dqcr/errors.hpp"

namespace dqcr {

MlpParams MlpParams::zeros(const MlpShape& s) {
  MlpParams p;
  p.w1 = Eigen::MatrixXd::Zero(s.hidden1, s.input);
  p.b1 = Eigen::VectorXd::Zero(s.hidden1);
  p.w2 = Eigen::MatrixXd::Zero(s.hidden2, s.hidden1);
  p.b2 = Eigen::VectorXd::Zero(s.hidden2);
  p.w3 = Eigen::MatrixXd::Zero(s.output, s.hidden2);
  p.b3 = Eigen::VectorXd::Zero(s.output);
  return p;
}

MlpShape MlpParams::shape() const {
  return {static_cast<int>(w1.cols()), static_cast<int>(w1.rows()), static_cast<int>(w2.rows()),
          static_cast<int>(w3.rows())};
}

bool MlpParams::all_finite() const {
  return w1.allFinite() && w2.allFinite() && w3.allFinite() && b1.allFinite() && b2.allFinite() &&
         b3.allFinite();
}

Mlp::Mlp(const MlpShape& shape, Rng& rng) : shape_(shape), params_(MlpParams::zeros(shape)) {
  if (shape.input < 1 || shape.hidden1 < 1 || shape.hidden2 < 1 || shape.output < 1) {
    throw ValidationError("network layer widths must be positive");
  }
  auto fill = [&](auto& m, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = (2.0 * rng.uniform01() - 1.0) * bound;
  };
  fill(params_.w1, shape.input);
  fill(params_.b1, shape.input);
  fill(params_.w2, shape.hidden1);
  fill(params_.b2, shape.hidden1);
  fill(params_.w3, shape.hidden2);
  fill(params_.b3, shape.hidden2);
}

Mlp::Mlp(MlpParams params) : shape_(params.shape()), params_(std::move(params)) {}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd batch = x;
  return forward(batch).col(0);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& batch, MlpCache* cache) const {
  if (batch.rows() != shape_.input) {
    throw ContractViolation("network expects input of size " + std::to_string(shape_.input) + ", got " +
                            std::to_string(batch.rows()));
  }
  const auto& p = params_;
  Eigen::MatrixXd z1 = p.w1 * batch;
  z1.colwise() += p.b1;
  Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
  Eigen::MatrixXd z2 = p.w2 * a1;
  z2.colwise() += p.b2;
  Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
  Eigen::MatrixXd out = p.w3 * a2;
  out.colwise() += p.b3;
  if (cache) {
    cache->input = batch;
    cache->z1 = std::move(z1);
    cache->a1 = std::move(a1);
    cache->z2 = std::move(z2);
    cache->a2 = std::move(a2);
  }
  return out;
}

MlpParams Mlp::backward(const MlpCache& cache, const Eigen::MatrixXd& d_out) const {
  const auto& p = params_;
  MlpParams g;
  g.w3 = d_out * cache.a2.transpose();
  g.b3 = d_out.rowwise().sum();
  Eigen::MatrixXd d_a2 = p.w3.transpose() * d_out;
  Eigen::MatrixXd d_z2 = d_a2.cwiseProduct((cache.z2.array() > 0.0).cast<double>().matrix());
  g.w2 = d_z2 * cache.a1.transpose();
  g.b2 = d_z2.rowwise().sum();
  Eigen::MatrixXd d_a1 = p.w2.transpose() * d_z2;
  Eigen::MatrixXd d_z1 = d_a1.cwiseProduct((cache.z1.array() > 0.0).cast<double>().matrix());
  g.w1 = d_z1 * cache.input.transpose();
  g.b1 = d_z1.rowwise().sum();
  return g;
}

void Mlp::soft_update_from(const Mlp& main, double tau) {
  if (!(main.shape_ == shape_)) throw ContractViolation("soft update between differently shaped networks");
  auto mix = [tau](auto& dst, const auto& src) { dst = tau * src + (1.0 - tau) * dst; };
  mix(params_.w1, main.params_.w1);
  mix(params_.b1, main.params_.b1);
  mix(params_.w2, main.params_.w2);
  mix(params_.b2, main.params_.b2);
  mix(params_.w3, main.params_.w3);
  mix(params_.b3, main.params_.b3);
}

Adam::Adam(const MlpShape& shape, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(MlpParams::zeros(shape)), v_(MlpParams::zeros(shape)) {}

void Adam::step(MlpParams& params, const MlpParams& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    theta.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  update(params.w1, grads.w1, m_.w1, v_.w1);
  update(params.b1, grads.b1, m_.b1, v_.b1);
  update(params.w2, grads.w2, m_.w2, v_.w2);
  update(params.b2, grads.b2, m_.b2, v_.b2);
  update(params.w3, grads.w3, m_.w3, v_.w3);
  update(params.b3, grads.b3, m_.b3, v_.b3);
}

}  // namespace dqcr
