// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dqcr/circuit_dag.hpp"
#include "dqcr/hardware_graph.hpp"

namespace dqcr {

// Mapping cell values besides virtual qubit indices.
inline constexpr int kEmpty = -1;
inline constexpr int kEprHalf = -2;

struct RewardConfig {
  double r_score = 500.0;
  double r_success = 3000.0;
  double r_fail = -3000.0;
  double r_stop = -20.0;
  double xi = 18.0;  // distance multiplier
  double w = 30.0;   // channel weight in the distance graph
};

// Durations in timesteps.
struct TimingConfig {
  int t_local = 1;
  int t_swap = 3;
  int t_gen = 5;
  int t_remote = 5;
};

struct EnvConfig {
  RewardConfig reward;
  TimingConfig timing;
  int t_max = 1500;
  // Informational only: t_gen already models the mean repeat-until-success
  // latency t_0 / p_gen.
  double p_gen = 0.95;

  // Throws ValidationError.
  void validate() const;
};

// Physical placement and clocks, without the circuit. Cheap to copy, which
// is what ROUT expansion and look-ahead use.
struct QubitLayout {
  std::vector<int> mapping;     // virtual index, kEmpty or kEprHalf
  std::vector<Edge> epr_pairs;  // holders of live EPR pairs
  std::vector<int> busy_until;  // qubit is idle iff busy_until <= now
  int now = 0;

  int num_qubits() const { return static_cast<int>(mapping.size()); }
  bool is_idle(int q) const { return busy_until[q] <= now; }
  bool holds_virtual(int q) const { return mapping[q] >= 0; }
  // Physical qubit holding virtual qubit v, or -1.
  int holder_of(int v) const;
  // Holder of the other half of the pair that q belongs to, or -1.
  int epr_partner(int q) const;
};

struct EnvState : QubitLayout {
  CircuitDag dag;
  int t_max = 1500;
  // Completion time of the latest executed circuit gate.
  int last_gate_done = 0;
};

// Primitive hardware operations that routing actions decompose into.
struct Op {
  enum class Kind { kSwap, kGenerate, kTeleQubit };
  Kind kind = Kind::kSwap;
  // Swap/Generate: the edge (a, b). TeleQubit: source a, near half b, far half c.
  int a = -1;
  int b = -1;
  int c = -1;

  static Op swap(int a, int b) { return {Kind::kSwap, a, b, -1}; }
  static Op generate(int a, int b) { return {Kind::kGenerate, a, b, -1}; }
  static Op telequbit(int source, int near, int far) { return {Kind::kTeleQubit, source, near, far}; }

  int arity() const { return kind == Kind::kTeleQubit ? 3 : 2; }
  std::array<int, 3> qubits() const { return {a, b, c}; }
  friend bool operator==(const Op&, const Op&) = default;
};

std::string to_string(const Op& op);

// Structural preconditions of `op` (edge type, markers, live pairs). When
// `require_idle` is set the participants must also be idle at layout.now.
// Returns an explanation when infeasible.
std::optional<std::string> check_op(const CouplingGraph& g, const QubitLayout& layout, const Op& op,
                                    bool require_idle);

// Applies the placement change immediately and reserves the participants
// from max(now, their clocks) for the op's duration. Throws
// InfeasibleOperation when check_op fails.
void schedule_op(const CouplingGraph& g, const TimingConfig& timing, QubitLayout& layout, const Op& op,
                 bool require_idle);

// Per-operation wrappers with the idle requirement of a freshly issued op.
void apply_swap(const CouplingGraph& g, const TimingConfig& timing, QubitLayout& layout, Edge e);
void apply_generate(const CouplingGraph& g, const TimingConfig& timing, QubitLayout& layout, Edge channel);
void apply_telequbit(const CouplingGraph& g, const TimingConfig& timing, QubitLayout& layout, int source,
                     int near, int far);

struct DeleteOutcome {
  std::vector<int> deleted;  // gate ids in execution order
  double reward = 0.0;
};

// Executes every feasible local CNOT or tele-gate on the frontier until
// none fires.
DeleteOutcome auto_execute_deletes(const CouplingGraph& g, const EnvConfig& config, EnvState& s);

// True if auto_execute_deletes would delete at least one gate.
bool has_pending_delete(const CouplingGraph& g, const EnvState& s);

// Sum over frontier gates of the distance between their holders in G_s.
// Throws ContractViolation if a frontier qubit is unmapped.
double distance_metric(const CouplingGraph& g, const EnvState& s, double w);

// Mapping part (EPR halves as -1) followed by (control, target, layer) per
// live gate in descending id order, zero padded to max_gates tuples.
std::vector<int> encode_state(const EnvState& s, int max_gates);
inline int state_size(int num_qubits, int max_gates) { return num_qubits + 3 * max_gates; }

// Checks mapping, EPR registry and clock invariants; returns the first
// violation found.
std::optional<std::string> find_invariant_violation(const CouplingGraph& g, const EnvState& s);

}  // namespace dqcr
