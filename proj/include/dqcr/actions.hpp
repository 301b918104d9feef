// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dqcr/env_state.hpp"
#include "dqcr/hardware_graph.hpp"

namespace dqcr {

enum class AgentMode {
  kBaseline,  // STOP, SWAP per local edge, tele-qubit and generate per channel
  kRout,      // STOP, ROUT per ordered qubit pair, generate per channel
};

std::string_view to_string(AgentMode mode);
AgentMode parse_agent_mode(std::string_view name);

enum class ActionKind { kStop, kSwap, kTeleQubit, kGenerate, kRout };

struct Action {
  ActionKind kind = ActionKind::kStop;
  int a = -1;
  int b = -1;

  static Action stop() { return {}; }
  static Action swap(Edge e) { return {ActionKind::kSwap, e.a, e.b}; }
  static Action telequbit(Edge e) { return {ActionKind::kTeleQubit, e.a, e.b}; }
  static Action generate(Edge e) { return {ActionKind::kGenerate, e.a, e.b}; }
  static Action rout(int i, int j) { return {ActionKind::kRout, i, j}; }

  friend bool operator==(const Action&, const Action&) = default;
};

// `STOP`, `SWAP:i-j`, `GEN:i-j`, `TQ:i-j`, `ROUT:i>j`.
std::string to_string(const Action& a);
// Throws ValidationError on malformed text.
Action parse_action(std::string_view text);

// Dense indexing of one agent's action alphabet, plus the layout of the
// network heads that score it.
//
// Baseline: [STOP | SWAP_e for e in E_n | TQ_e for e in E_c | GEN_e for e in E_c];
//           one head per action.
// ROUT:     [STOP | ROUT(i,j) row-major over i, j != i | GEN_e for e in E_c];
//           heads are [STOP | GEN_e | Q_i for i in V] and ROUT(i,j) is scored
//           by the induced value (1-alpha) Q_i + alpha Q_j.
class ActionSpace {
 public:
  ActionSpace(const CouplingGraph& g, AgentMode mode);

  AgentMode mode() const { return mode_; }
  int size() const { return size_; }
  int num_heads() const { return num_heads_; }
  int num_qubits() const { return num_qubits_; }

  Action action(int index) const;
  // Throws ContractViolation for actions outside the alphabet.
  int index(const Action& a) const;

  int rout_index(int i, int j) const;
  int generate_index(int channel) const;

  // Head positions in the ROUT layout.
  int stop_head() const { return 0; }
  int generate_head(int channel) const { return 1 + channel; }
  int qubit_head(int q) const { return 1 + num_channels_ + q; }

 private:
  AgentMode mode_;
  int num_qubits_;
  int num_local_;
  int num_channels_;
  int size_;
  int num_heads_;
  std::vector<Edge> local_edges_;
  std::vector<Edge> channels_;
};

using ActionMask = std::vector<bool>;

// Which of the three admissible routing classes a ROUT action falls in.
enum class RoutClass {
  kFrontierToPartner,   // moves a frontier qubit towards its gate partner
  kEmptyToChannel,      // moves a non-initialized qubit towards a channel endpoint
  kEprFrontierMeet,     // moves an EPR half and a frontier qubit towards each other
};

// Everything the action machinery needs besides the state.
struct ActionContext {
  const CouplingGraph& graph;
  const PathTable& paths;
  const EnvConfig& config;
  const ActionSpace& space;
};

// Baseline tele-qubit source for channel e: a virtual qubit local-adjacent
// to one half of the pair sitting on e, preferring frontier qubits whose
// gate partner lives on the far side, then the lowest physical index.
std::optional<Op> baseline_telequbit(const ActionContext& ctx, const EnvState& s, Edge channel);

ActionMask baseline_mask(const ActionContext& ctx, const EnvState& s);
ActionMask rout_mask(const ActionContext& ctx, const EnvState& s);
// Dispatches on ctx.space.mode().
ActionMask compute_mask(const ActionContext& ctx, const EnvState& s);

// Class of ROUT(i, j) in state s, or nullopt when it belongs to none. The
// classes are checked in order, so the result is unique.
std::optional<RoutClass> classify_rout(const ActionContext& ctx, const EnvState& s, int i, int j);

// Chain of primitive ops moving the content of i along the frozen path to
// j. Channels are crossed by tele-qubit only over a live EPR pair; the chain
// stops in front of a channel it cannot cross. Returns an empty chain when
// the first op is not immediately executable.
std::vector<Op> try_expand_rout(const ActionContext& ctx, const QubitLayout& s, int i, int j);
// As above, but throws ContractViolation when the chain would be empty.
std::vector<Op> expand_rout(const ActionContext& ctx, const QubitLayout& s, int i, int j);

// Primitive ops for any non-STOP action (STOP maps to an empty list; the
// environment handles time skipping). Throws ContractViolation when the
// action cannot be realized in s.
std::vector<Op> to_env_ops(const ActionContext& ctx, const EnvState& s, const Action& a);

// Whether `a` is admissible in s, without building the full mask.
bool is_admissible(const ActionContext& ctx, const EnvState& s, const Action& a);

}  // namespace dqcr
