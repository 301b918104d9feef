// SPDX-License-Identifier: Apache-2.0
#include "dqcr/environment.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "dqcr/errors.hpp"
#include "dqcr/rng.hpp"

namespace dqcr {

World::World(CouplingGraph graph, EnvConfig config, AgentMode mode, std::uint64_t path_seed)
    : graph_(std::move(graph)),
      config_(config),
      paths_(graph_, path_seed),
      space_(graph_, mode),
      path_seed_(path_seed) {
  config_.validate();
}

double move_reward(double d_before, double d_after, double xi, AgentMode mode) {
  const double r = xi * (d_before - d_after);
  return mode == AgentMode::kRout ? std::max(r, 0.0) : r;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::kRunning:
      return "running";
    case Outcome::kSuccess:
      return "success";
    case Outcome::kFailure:
      return "failure";
  }
  return "?";
}

Environment::Environment(std::shared_ptr<const World> world) : world_(std::move(world)) {}

StepResult Environment::reset(const CircuitDag& dag, std::uint64_t seed) {
  const int n = world_->graph().num_qubits();
  if (dag.num_virtual_qubits() > n) {
    throw ValidationError("circuit uses " + std::to_string(dag.num_virtual_qubits()) +
                          " virtual qubits but the hardware has " + std::to_string(n));
  }
  std::vector<int> slots(n);
  std::iota(slots.begin(), slots.end(), 0);
  Rng rng(seed);
  rng.shuffle(slots);
  std::vector<int> mapping(n, kEmpty);
  for (int v = 0; v < dag.num_virtual_qubits(); ++v) mapping[slots[v]] = v;
  return reset_with_mapping(dag, std::move(mapping));
}

StepResult Environment::reset_with_mapping(const CircuitDag& dag, std::vector<int> mapping) {
  const int n = world_->graph().num_qubits();
  if (static_cast<int>(mapping.size()) != n) throw ValidationError("mapping length must equal qubit count");
  state_ = EnvState{};
  state_.mapping = std::move(mapping);
  state_.busy_until.assign(n, 0);
  state_.now = 0;
  state_.dag = dag;
  state_.t_max = world_->config().t_max;
  state_.last_gate_done = 0;
  std::set<int> seen;
  for (int v : state_.mapping) {
    if (v == kEmpty) continue;
    if (v < 0 || v >= dag.num_virtual_qubits() || !seen.insert(v).second) {
      throw ValidationError("mapping must place each virtual qubit exactly once");
    }
  }
  if (static_cast<int>(seen.size()) != dag.num_virtual_qubits()) {
    throw ValidationError("mapping must place each virtual qubit exactly once");
  }
  outcome_ = Outcome::kRunning;
  trace_.clear();
  return finish_reset();
}

StepResult Environment::finish_reset() {
  StepResult r;
  const auto deletes = auto_execute_deletes(world_->graph(), world_->config(), state_);
  r.deleted = static_cast<int>(deletes.deleted.size());
  r.reward.score = deletes.reward;
  check_terminal(r);
  return r;
}

void Environment::check_terminal(StepResult& r) {
  const auto& reward = world_->config().reward;
  if (state_.dag.empty()) {
    outcome_ = Outcome::kSuccess;
    r.reward.terminal = reward.r_success;
  } else if (state_.now >= state_.t_max) {
    outcome_ = Outcome::kFailure;
    r.reward.terminal = reward.r_fail;
  }
  r.done = done();
}

ActionMask Environment::mask() const { return compute_mask(world_->context(), state_); }

int Environment::stop_duration() const {
  if (world_->mode() == AgentMode::kBaseline) return 1;
  const auto ctx = world_->context();
  auto any_action = [&](const EnvState& s) {
    const auto m = compute_mask(ctx, s);
    return std::find(m.begin() + 1, m.end(), true) != m.end();
  };
  if (any_action(state_)) return 1;
  std::set<int> events;
  for (int t : state_.busy_until) {
    if (t > state_.now) events.insert(t);
  }
  EnvState probe = state_;
  for (int t : events) {
    probe.now = t;
    if (has_pending_delete(world_->graph(), probe) || any_action(probe)) return t - state_.now;
  }
  return 1;
}

StepResult Environment::step(const Action& action) {
  if (done()) throw ContractViolation("step after the episode has ended");
  const auto ctx = world_->context();
  if (!is_admissible(ctx, state_, action)) {
    throw ContractViolation("inadmissible action " + to_string(action));
  }
  const auto& config = world_->config();
  const auto& g = world_->graph();
  StepResult r;
  const int issued_at = state_.now;
  if (action.kind == ActionKind::kStop) {
    const int skip = std::min(stop_duration(), state_.t_max - state_.now);
    state_.now += skip;
    r.skipped = skip;
    r.reward.stop = world_->mode() == AgentMode::kRout ? config.reward.r_stop * skip : config.reward.r_stop;
  } else {
    const double before = distance_metric(g, state_, config.reward.w);
    const auto ops = to_env_ops(ctx, state_, action);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      schedule_op(g, config.timing, state_, ops[k], k == 0);
    }
    const double after = distance_metric(g, state_, config.reward.w);
    r.reward.move = move_reward(before, after, config.reward.xi, world_->mode());
  }
  const auto deletes = auto_execute_deletes(g, config, state_);
  r.deleted = static_cast<int>(deletes.deleted.size());
  r.reward.score = deletes.reward;
  check_terminal(r);
  if (tracing_) {
    trace_.push_back({issued_at, action, r.reward.total(), state_.dag.num_remaining(), distance()});
  }
  return r;
}

int Environment::elapsed() const {
  return outcome_ == Outcome::kSuccess ? state_.last_gate_done : state_.now;
}

double Environment::distance() const {
  return distance_metric(world_->graph(), state_, world_->config().reward.w);
}

}  // namespace dqcr
