// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dqcr/actions.hpp"
#include "dqcr/circuit_dag.hpp"
#include "dqcr/env_state.hpp"
#include "dqcr/hardware_graph.hpp"

namespace dqcr {

// Immutable per-run setup shared by every environment instance.
class World {
 public:
  World(CouplingGraph graph, EnvConfig config, AgentMode mode, std::uint64_t path_seed);

  const CouplingGraph& graph() const { return graph_; }
  const PathTable& paths() const { return paths_; }
  const EnvConfig& config() const { return config_; }
  const ActionSpace& space() const { return space_; }
  AgentMode mode() const { return space_.mode(); }
  ActionContext context() const { return {graph_, paths_, config_, space_}; }
  std::uint64_t path_seed() const { return path_seed_; }

 private:
  CouplingGraph graph_;
  EnvConfig config_;
  PathTable paths_;
  ActionSpace space_;
  std::uint64_t path_seed_;
};

// Reward of one transition, split by source so episodes can be audited.
struct RewardParts {
  double score = 0.0;     // R_score per deleted gate
  double move = 0.0;      // distance-progress reward
  double stop = 0.0;      // STOP penalty
  double terminal = 0.0;  // R_success or R_fail

  double total() const { return score + move + stop + terminal; }
};

struct StepResult {
  RewardParts reward;
  bool done = false;
  int deleted = 0;
  int skipped = 0;  // timesteps advanced by a STOP
};

enum class Outcome { kRunning, kSuccess, kFailure };

struct TraceRow {
  int t = 0;
  Action action;
  double reward = 0.0;
  int gates_remaining = 0;
  double distance = 0.0;
};

// Baseline move reward xi (d(s) - d(s')); the ROUT agent never sees a
// negative move reward.
double move_reward(double d_before, double d_after, double xi, AgentMode mode);

// Discrete-event simulator for one episode at a time.
class Environment {
 public:
  explicit Environment(std::shared_ptr<const World> world);

  // Random injective placement drawn from `seed`, then one round of
  // automatic deletes. Throws ValidationError if the circuit has more
  // virtual qubits than the hardware has physical ones.
  StepResult reset(const CircuitDag& dag, std::uint64_t seed);
  // Explicit placement: mapping[q] is a virtual qubit or kEmpty.
  StepResult reset_with_mapping(const CircuitDag& dag, std::vector<int> mapping);

  // Applies an admissible action, runs automatic deletes and checks the
  // episode end. Throws ContractViolation for inadmissible actions or
  // after the episode has ended.
  StepResult step(const Action& action);
  StepResult step_index(int action_index) { return step(world_->space().action(action_index)); }

  ActionMask mask() const;
  // Timesteps a STOP issued now would advance.
  int stop_duration() const;

  const EnvState& state() const { return state_; }
  const World& world() const { return *world_; }
  Outcome outcome() const { return outcome_; }
  bool done() const { return outcome_ != Outcome::kRunning; }
  // Modeled execution time: completion of the last gate on success, the
  // clock at the deadline otherwise.
  int elapsed() const;
  double distance() const;

  void enable_trace(bool on) { tracing_ = on; }
  const std::vector<TraceRow>& trace() const { return trace_; }

 private:
  StepResult finish_reset();
  void check_terminal(StepResult& r);

  std::shared_ptr<const World> world_;
  EnvState state_;
  Outcome outcome_ = Outcome::kRunning;
  bool tracing_ = false;
  std::vector<TraceRow> trace_;
};

std::string to_string(Outcome o);

}  // namespace dqcr
