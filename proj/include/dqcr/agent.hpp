// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dqcr/actions.hpp"
#include "dqcr/mlp.hpp"
#include "dqcr/replay_buffer.hpp"
#include "dqcr/rng.hpp"

namespace dqcr {

struct AgentConfig {
  int hidden1 = 150;
  int hidden2 = 140;
  double learning_rate = 1e-5;
  double gamma = 0.99;
  double tau = 0.001;
  double epsilon0 = 1.0;
  double epsilon_decay = 80.0;
  std::size_t batch_size = 2560;
  std::size_t buffer_size = 100000;
  int learn_every = 5;
  int learn_iterations = 10;
  double alpha = 0.25;        // induced-Q weight of the target qubit
  bool scale_inputs = false;  // divide the state vector by |V|

  // Throws ValidationError.
  void validate() const;
};

// eps0 / (1 + k / eps_decay)
double epsilon(int episode, double epsilon0, double epsilon_decay);

// (1 - alpha) q_i + alpha q_j. Throws ContractViolation unless 0 < alpha < 0.5.
double induced_q(double q_i, double q_j, double alpha);

// Highest induced value over all ordered pairs (i, j), i != j, of the
// per-qubit heads in O(|V|), ties towards the lowest (i, j).
std::pair<int, int> best_rout_pair(std::span<const double> qubit_heads, double alpha);

// Maps network heads to per-action values for one alphabet.
class QLayout {
 public:
  QLayout(const ActionSpace& space, double alpha);

  int num_heads() const { return space_->num_heads(); }
  double value(const Eigen::Ref<const Eigen::VectorXd>& heads, int action) const;
  // Adds g * dQ(action)/dheads into grad.
  void accumulate_grad(Eigen::Ref<Eigen::VectorXd> grad, int action, double g) const;
  // Admissible argmax, ties towards the lowest index. Throws
  // ContractViolation on an empty mask.
  int argmax(const Eigen::Ref<const Eigen::VectorXd>& heads, const ActionMask& mask) const;

 private:
  const ActionSpace* space_;
  double alpha_;
};

// Uniform over admissible actions with probability eps, admissible argmax
// otherwise.
int select_action(const QLayout& layout, const Eigen::Ref<const Eigen::VectorXd>& heads,
                  const ActionMask& mask, double eps, Rng& rng);

// Double DQN agent with main and target networks.
class DdqnAgent {
 public:
  DdqnAgent(const ActionSpace& space, int input_dim, AgentConfig config, std::uint64_t seed);

  const AgentConfig& config() const { return config_; }
  const QLayout& layout() const { return layout_; }
  int input_dim() const { return main_.shape().input; }

  Mlp& main() { return main_; }
  Mlp& target() { return target_; }
  const Mlp& main() const { return main_; }
  const Mlp& target() const { return target_; }
  ReplayBuffer& buffer() { return buffer_; }
  Rng& rng() { return rng_; }

  Eigen::VectorXd input(std::span<const int> state) const;
  Eigen::VectorXd heads(std::span<const int> state) const;
  int act(std::span<const int> state, const ActionMask& mask, double eps);

  void remember(Experience e);
  // Counts one action; every learn_every actions with enough samples runs
  // learn_iterations updates. Returns their mean loss when it learned.
  std::optional<double> observe_action();

  // y = r for terminal samples, else r + gamma * Q_target(s', a_hat) with
  // a_hat the admissible argmax of the main network at s'.
  std::vector<double> ddqn_targets(std::span<const Experience* const> batch) const;
  // One Adam step on the squared error against ddqn_targets, then a soft
  // target update. Returns the batch loss before the step.
  double learn_on(std::span<const Experience* const> batch);
  // Samples a batch from the buffer. Throws ContractViolation when the
  // buffer is smaller than the batch size.
  double learn_step();

 private:
  Eigen::MatrixXd batch_input(std::span<const Experience* const> batch, bool next) const;

  const ActionSpace* space_;
  AgentConfig config_;
  QLayout layout_;
  Rng rng_;
  Mlp main_;
  Mlp target_;
  Adam adam_;
  ReplayBuffer buffer_;
  long actions_seen_ = 0;
  double input_scale_ = 1.0;
};

}  // namespace dqcr
