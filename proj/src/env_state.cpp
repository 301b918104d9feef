// SPDX-License-Identifier: Apache-2.0
#include "dqcr/env_state.hpp"

#include <algorithm>
#include <set>

#include "dqcr/errors.hpp"

namespace dqcr {

void EnvConfig::validate() const {
  const auto& t = timing;
  if (t.t_local < 1 || t.t_swap < 1 || t.t_gen < 1 || t.t_remote < 1) {
    throw ValidationError("operation durations must be positive integers");
  }
  if (!(reward.xi > 0.0)) throw ValidationError("distance multiplier xi must be positive");
  if (!(reward.w > 1.0)) throw ValidationError("distance weight w must exceed 1");
  if (t_max < 1) throw ValidationError("t_max must be positive");
}

int QubitLayout::holder_of(int v) const {
  auto it = std::find(mapping.begin(), mapping.end(), v);
  return it == mapping.end() ? -1 : static_cast<int>(it - mapping.begin());
}

int QubitLayout::epr_partner(int q) const {
  for (const auto& e : epr_pairs) {
    if (e.touches(q)) return e.other(q);
  }
  return -1;
}

std::string to_string(const Op& op) {
  switch (op.kind) {
    case Op::Kind::kSwap:
      return "SWAP:" + std::to_string(op.a) + "-" + std::to_string(op.b);
    case Op::Kind::kGenerate:
      return "GEN:" + std::to_string(op.a) + "-" + std::to_string(op.b);
    case Op::Kind::kTeleQubit:
      return "TQ:" + std::to_string(op.a) + ">" + std::to_string(op.b) + "~" + std::to_string(op.c);
  }
  return "?";
}

namespace {

int duration(const TimingConfig& timing, Op::Kind kind) {
  switch (kind) {
    case Op::Kind::kSwap:
      return timing.t_swap;
    case Op::Kind::kGenerate:
      return timing.t_gen;
    case Op::Kind::kTeleQubit:
      return timing.t_remote;
  }
  return 0;
}

void erase_pair(std::vector<Edge>& pairs, Edge e) {
  pairs.erase(std::remove(pairs.begin(), pairs.end(), e), pairs.end());
}

}  // namespace

std::optional<std::string> check_op(const CouplingGraph& g, const QubitLayout& layout, const Op& op,
                                    bool require_idle) {
  const int n = layout.num_qubits();
  const auto qs = op.qubits();
  for (int k = 0; k < op.arity(); ++k) {
    if (qs[k] < 0 || qs[k] >= n) return "qubit out of range";
  }
  if (require_idle) {
    for (int k = 0; k < op.arity(); ++k) {
      if (!layout.is_idle(qs[k])) return "qubit " + std::to_string(qs[k]) + " is busy";
    }
  }
  switch (op.kind) {
    case Op::Kind::kSwap:
      if (!g.is_local_edge(op.a, op.b)) return "swap needs a local edge";
      return std::nullopt;
    case Op::Kind::kGenerate:
      if (!g.is_channel(op.a, op.b)) return "generate needs a quantum channel";
      if (layout.mapping[op.a] != kEmpty || layout.mapping[op.b] != kEmpty) {
        return "generate needs non-initialized endpoints";
      }
      return std::nullopt;
    case Op::Kind::kTeleQubit:
      if (!layout.holds_virtual(op.a)) return "tele-qubit source holds no virtual qubit";
      if (!g.is_local_edge(op.a, op.b)) return "tele-qubit source is not adjacent to the near EPR half";
      if (std::find(layout.epr_pairs.begin(), layout.epr_pairs.end(), Edge(op.b, op.c)) ==
          layout.epr_pairs.end()) {
        return "no live EPR pair between " + std::to_string(op.b) + " and " + std::to_string(op.c);
      }
      return std::nullopt;
  }
  return "unknown op";
}

void schedule_op(const CouplingGraph& g, const TimingConfig& timing, QubitLayout& layout, const Op& op,
                 bool require_idle) {
  if (auto why = check_op(g, layout, op, require_idle)) {
    throw InfeasibleOperation(to_string(op) + ": " + *why);
  }
  const auto qs = op.qubits();
  int start = layout.now;
  for (int k = 0; k < op.arity(); ++k) start = std::max(start, layout.busy_until[qs[k]]);
  const int end = start + duration(timing, op.kind);
  for (int k = 0; k < op.arity(); ++k) layout.busy_until[qs[k]] = end;

  auto& m = layout.mapping;
  switch (op.kind) {
    case Op::Kind::kSwap: {
      // EPR halves travel with the swap; re-point their registry entries
      for (auto& e : layout.epr_pairs) {
        int x = e.a, y = e.b;
        if (x == op.a) x = op.b; else if (x == op.b) x = op.a;
        if (y == op.a) y = op.b; else if (y == op.b) y = op.a;
        e = Edge(x, y);
      }
      std::swap(m[op.a], m[op.b]);
      break;
    }
    case Op::Kind::kGenerate:
      m[op.a] = kEprHalf;
      m[op.b] = kEprHalf;
      layout.epr_pairs.emplace_back(op.a, op.b);
      break;
    case Op::Kind::kTeleQubit:
      m[op.c] = m[op.a];
      m[op.a] = kEmpty;
      m[op.b] = kEmpty;
      erase_pair(layout.epr_pairs, Edge(op.b, op.c));
      break;
  }
}

void apply_swap(const CouplingGraph& g, const TimingConfig& timing, QubitLayout& layout, Edge e) {
  schedule_op(g, timing, layout, Op::swap(e.a, e.b), true);
}

void apply_generate(const CouplingGraph& g, const TimingConfig& timing, QubitLayout& layout, Edge channel) {
  schedule_op(g, timing, layout, Op::generate(channel.a, channel.b), true);
}

void apply_telequbit(const CouplingGraph& g, const TimingConfig& timing, QubitLayout& layout, int source,
                     int near, int far) {
  schedule_op(g, timing, layout, Op::telequbit(source, near, far), true);
}

namespace {

// Live pair usable for a tele-gate between holders hx and hy: one half
// local-adjacent to each, everything idle. Returns the pair or nullopt.
std::optional<Edge> telegate_pair(const CouplingGraph& g, const QubitLayout& s, int hx, int hy) {
  for (const auto& e : s.epr_pairs) {
    if (!s.is_idle(e.a) || !s.is_idle(e.b)) continue;
    if ((g.is_local_edge(hx, e.a) && g.is_local_edge(hy, e.b)) ||
        (g.is_local_edge(hx, e.b) && g.is_local_edge(hy, e.a))) {
      return e;
    }
  }
  return std::nullopt;
}

enum class DeleteKind { kNone, kLocal, kTeleGate };

DeleteKind feasible_delete(const CouplingGraph& g, const EnvState& s, const Gate& gate, int& hx, int& hy,
                           Edge& pair) {
  hx = s.holder_of(gate.control);
  hy = s.holder_of(gate.target);
  if (hx < 0 || hy < 0 || !s.is_idle(hx) || !s.is_idle(hy)) return DeleteKind::kNone;
  if (g.is_local_edge(hx, hy)) return DeleteKind::kLocal;
  if (g.module_of(hx) != g.module_of(hy)) {
    if (auto p = telegate_pair(g, s, hx, hy)) {
      pair = *p;
      return DeleteKind::kTeleGate;
    }
  }
  return DeleteKind::kNone;
}

}  // namespace

DeleteOutcome auto_execute_deletes(const CouplingGraph& g, const EnvConfig& config, EnvState& s) {
  DeleteOutcome out;
  bool fired = true;
  while (fired) {
    fired = false;
    for (const auto& gate : s.dag.frontier()) {
      int hx = -1, hy = -1;
      Edge pair;
      const auto kind = feasible_delete(g, s, gate, hx, hy, pair);
      if (kind == DeleteKind::kNone) continue;
      int end = s.now;
      if (kind == DeleteKind::kLocal) {
        end += config.timing.t_local;
        s.busy_until[hx] = s.busy_until[hy] = end;
      } else {
        end += config.timing.t_remote;
        for (int q : {hx, hy, pair.a, pair.b}) s.busy_until[q] = end;
        s.mapping[pair.a] = kEmpty;
        s.mapping[pair.b] = kEmpty;
        erase_pair(s.epr_pairs, pair);
      }
      s.last_gate_done = std::max(s.last_gate_done, end);
      s.dag.delete_gate(gate.id);
      out.deleted.push_back(gate.id);
      out.reward += config.reward.r_score;
      fired = true;
    }
  }
  return out;
}

bool has_pending_delete(const CouplingGraph& g, const EnvState& s) {
  for (const auto& gate : s.dag.frontier()) {
    int hx = -1, hy = -1;
    Edge pair;
    if (feasible_delete(g, s, gate, hx, hy, pair) != DeleteKind::kNone) return true;
  }
  return false;
}

double distance_metric(const CouplingGraph& g, const EnvState& s, double w) {
  const auto frontier = s.dag.frontier();
  if (frontier.empty()) return 0.0;
  const WeightedDistance dist(g, s.epr_pairs, w);
  double total = 0.0;
  for (const auto& gate : frontier) {
    const int hx = s.holder_of(gate.control);
    const int hy = s.holder_of(gate.target);
    if (hx < 0 || hy < 0) {
      throw ContractViolation("frontier gate " + std::to_string(gate.id) + " has an unmapped qubit");
    }
    total += dist(hx, hy);
  }
  return total;
}

std::vector<int> encode_state(const EnvState& s, int max_gates) {
  if (s.dag.num_remaining() > max_gates) {
    throw ContractViolation("state has " + std::to_string(s.dag.num_remaining()) +
                            " live gates, encoder holds " + std::to_string(max_gates));
  }
  std::vector<int> out;
  out.reserve(s.mapping.size() + 3 * static_cast<std::size_t>(max_gates));
  for (int v : s.mapping) out.push_back(v == kEprHalf ? kEmpty : v);
  auto gates = s.dag.remaining();
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    out.push_back(it->control);
    out.push_back(it->target);
    out.push_back(it->layer);
  }
  out.resize(s.mapping.size() + 3 * static_cast<std::size_t>(max_gates), 0);
  return out;
}

std::optional<std::string> find_invariant_violation(const CouplingGraph& g, const EnvState& s) {
  const int n = g.num_qubits();
  if (s.num_qubits() != n || static_cast<int>(s.busy_until.size()) != n) return "layout size mismatch";
  std::set<int> seen;
  int halves = 0;
  for (int q = 0; q < n; ++q) {
    const int v = s.mapping[q];
    if (v >= 0) {
      if (v >= s.dag.num_virtual_qubits()) return "virtual qubit out of range";
      if (!seen.insert(v).second) return "virtual qubit " + std::to_string(v) + " mapped twice";
    } else if (v == kEprHalf) {
      ++halves;
    } else if (v != kEmpty) {
      return "invalid mapping marker";
    }
  }
  if (static_cast<int>(seen.size()) != s.dag.num_virtual_qubits()) return "virtual qubit lost";
  if (halves != 2 * static_cast<int>(s.epr_pairs.size())) return "EPR markers disagree with registry";
  std::set<int> holders;
  for (const auto& e : s.epr_pairs) {
    if (s.mapping[e.a] != kEprHalf || s.mapping[e.b] != kEprHalf) return "registry points at a non-EPR qubit";
    if (!holders.insert(e.a).second || !holders.insert(e.b).second) return "qubit in two EPR pairs";
    if (g.module_of(e.a) == g.module_of(e.b)) return "EPR pair inside one module";
  }
  if (s.now > s.t_max) return "time beyond deadline";
  return std::nullopt;
}

}  // namespace dqcr
