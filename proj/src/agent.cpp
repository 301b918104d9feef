// SPDX-License-Identifier: Apache-2.0
#include "dqcr/agent.hpp"

#include <algorithm>
#include <limits>

#include "dqcr/errors.hpp"

namespace dqcr {

void AgentConfig::validate() const {
  if (hidden1 < 1 || hidden2 < 1) throw ValidationError("hidden layer widths must be positive");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in (0, 1]");
  if (!(epsilon0 > 0.0 && epsilon0 <= 1.0)) throw ValidationError("epsilon0 must lie in (0, 1]");
  if (!(epsilon_decay > 0.0)) throw ValidationError("epsilon decay must be positive");
  if (batch_size < 1 || buffer_size < batch_size) throw ValidationError("need 1 <= batch size <= buffer size");
  if (learn_every < 1 || learn_iterations < 1) throw ValidationError("learning schedule must be positive");
  if (!(alpha > 0.0 && alpha < 0.5)) throw ValidationError("alpha must lie in (0, 0.5)");
}

double epsilon(int episode, double epsilon0, double epsilon_decay) {
  return epsilon0 / (1.0 + static_cast<double>(episode) / epsilon_decay);
}

double induced_q(double q_i, double q_j, double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw ContractViolation("alpha must lie in (0, 0.5)");
  return (1.0 - alpha) * q_i + alpha * q_j;
}

std::pair<int, int> best_rout_pair(std::span<const double> q, double alpha) {
  const int n = static_cast<int>(q.size());
  if (n < 2) throw ContractViolation("need at least two qubit heads");
  // for a fixed source the best target is the largest other head
  int top = 0, second = -1;
  for (int k = 1; k < n; ++k) {
    if (q[k] > q[top]) {
      second = top;
      top = k;
    } else if (second < 0 || q[k] > q[second]) {
      second = k;
    }
  }
  std::pair<int, int> best{-1, -1};
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    int j = i == top ? second : top;
    // lowest-index tie among equal targets
    for (int k = 0; k < j; ++k) {
      if (k != i && q[k] == q[j]) {
        j = k;
        break;
      }
    }
    const double v = induced_q(q[i], q[j], alpha);
    if (v > best_value) {
      best_value = v;
      best = {i, j};
    }
  }
  return best;
}

QLayout::QLayout(const ActionSpace& space, double alpha) : space_(&space), alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw ContractViolation("alpha must lie in (0, 0.5)");
}

double QLayout::value(const Eigen::Ref<const Eigen::VectorXd>& heads, int action) const {
  if (space_->mode() == AgentMode::kBaseline) return heads[action];
  const Action a = space_->action(action);
  switch (a.kind) {
    case ActionKind::kStop:
      return heads[space_->stop_head()];
    case ActionKind::kGenerate:
      return heads[space_->generate_head(action - space_->generate_index(0))];
    default:
      return induced_q(heads[space_->qubit_head(a.a)], heads[space_->qubit_head(a.b)], alpha_);
  }
}

void QLayout::accumulate_grad(Eigen::Ref<Eigen::VectorXd> grad, int action, double g) const {
  if (space_->mode() == AgentMode::kBaseline) {
    grad[action] += g;
    return;
  }
  const Action a = space_->action(action);
  switch (a.kind) {
    case ActionKind::kStop:
      grad[space_->stop_head()] += g;
      break;
    case ActionKind::kGenerate:
      grad[space_->generate_head(action - space_->generate_index(0))] += g;
      break;
    default:
      grad[space_->qubit_head(a.a)] += (1.0 - alpha_) * g;
      grad[space_->qubit_head(a.b)] += alpha_ * g;
  }
}

int QLayout::argmax(const Eigen::Ref<const Eigen::VectorXd>& heads, const ActionMask& mask) const {
  int best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(mask.size()); ++k) {
    if (!mask[k]) continue;
    const double v = value(heads, k);
    if (best < 0 || v > best_value) {
      best = k;
      best_value = v;
    }
  }
  if (best < 0) throw ContractViolation("argmax over an empty mask");
  return best;
}

int select_action(const QLayout& layout, const Eigen::Ref<const Eigen::VectorXd>& heads,
                  const ActionMask& mask, double eps, Rng& rng) {
  const auto admissible = std::count(mask.begin(), mask.end(), true);
  if (admissible == 0) throw ContractViolation("no admissible action");
  if (rng.uniform01() < eps) {
    auto pick = static_cast<long>(rng.uniform(static_cast<std::uint64_t>(admissible)));
    for (int k = 0; k < static_cast<int>(mask.size()); ++k) {
      if (mask[k] && pick-- == 0) return k;
    }
  }
  return layout.argmax(heads, mask);
}

DdqnAgent::DdqnAgent(const ActionSpace& space, int input_dim, AgentConfig config, std::uint64_t seed)
    : space_(&space),
      config_(config),
      layout_(space, config.alpha),
      rng_(seed),
      buffer_((config.validate(), config.buffer_size)) {
  const MlpShape shape{input_dim, config_.hidden1, config_.hidden2, space.num_heads()};
  main_ = Mlp(shape, rng_);
  target_ = main_;
  adam_ = Adam(shape, config_.learning_rate);
  if (config_.scale_inputs) input_scale_ = 1.0 / space.num_qubits();
}

Eigen::VectorXd DdqnAgent::input(std::span<const int> state) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(state.size()));
  for (std::size_t k = 0; k < state.size(); ++k) x[k] = state[k] * input_scale_;
  return x;
}

Eigen::VectorXd DdqnAgent::heads(std::span<const int> state) const { return main_.forward(input(state)); }

int DdqnAgent::act(std::span<const int> state, const ActionMask& mask, double eps) {
  // skip the forward pass when the greedy branch cannot be taken
  if (eps >= 1.0) return select_action(layout_, Eigen::VectorXd::Zero(space_->num_heads()), mask, eps, rng_);
  return select_action(layout_, heads(state), mask, eps, rng_);
}

void DdqnAgent::remember(Experience e) { buffer_.push(std::move(e)); }

std::optional<double> DdqnAgent::observe_action() {
  ++actions_seen_;
  if (actions_seen_ % config_.learn_every != 0 || buffer_.size() < config_.batch_size) return std::nullopt;
  double total = 0.0;
  for (int k = 0; k < config_.learn_iterations; ++k) total += learn_step();
  return total / config_.learn_iterations;
}

Eigen::MatrixXd DdqnAgent::batch_input(std::span<const Experience* const> batch, bool next) const {
  Eigen::MatrixXd x(input_dim(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& s = next ? batch[b]->next_state : batch[b]->state;
    if (static_cast<int>(s.size()) != input_dim()) throw ContractViolation("experience state has wrong size");
    for (int k = 0; k < input_dim(); ++k) x(k, static_cast<Eigen::Index>(b)) = s[k] * input_scale_;
  }
  return x;
}

std::vector<double> DdqnAgent::ddqn_targets(std::span<const Experience* const> batch) const {
  std::vector<double> y(batch.size());
  const Eigen::MatrixXd next = batch_input(batch, true);
  const Eigen::MatrixXd q_main = main_.forward(next);
  const Eigen::MatrixXd q_target = target_.forward(next);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& e = *batch[b];
    if (e.done) {
      y[b] = e.reward;
      continue;
    }
    const auto col = static_cast<Eigen::Index>(b);
    const int a_hat = layout_.argmax(q_main.col(col), e.next_mask);
    y[b] = e.reward + config_.gamma * layout_.value(q_target.col(col), a_hat);
  }
  return y;
}

double DdqnAgent::learn_on(std::span<const Experience* const> batch) {
  if (batch.empty()) throw ContractViolation("learning on an empty batch");
  const auto y = ddqn_targets(batch);
  MlpCache cache;
  const Eigen::MatrixXd q = main_.forward(batch_input(batch, false), &cache);
  Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  const double scale = 2.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    const double diff = layout_.value(q.col(col), batch[b]->action) - y[b];
    loss += diff * diff;
    layout_.accumulate_grad(d_out.col(col), batch[b]->action, scale * diff);
  }
  const MlpParams grads = main_.backward(cache, d_out);
  adam_.step(main_.params(), grads);
  target_.soft_update_from(main_, config_.tau);
  return loss / static_cast<double>(batch.size());
}

double DdqnAgent::learn_step() {
  const auto batch = buffer_.sample(config_.batch_size, rng_);
  return learn_on(batch);
}

}  // namespace dqcr
