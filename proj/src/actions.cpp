// SPDX-License-Identifier: Apache-2.0
#include "dqcr/actions.hpp"

#include <algorithm>
#include <charconv>

#include "dqcr/errors.hpp"

namespace dqcr {

std::string_view to_string(AgentMode mode) {
  return mode == AgentMode::kBaseline ? "baseline" : "rout";
}

AgentMode parse_agent_mode(std::string_view name) {
  if (name == "baseline") return AgentMode::kBaseline;
  if (name == "rout") return AgentMode::kRout;
  throw ValidationError("unknown agent '" + std::string(name) + "' (expected baseline or rout)");
}

std::string to_string(const Action& a) {
  const auto pair = [&](char sep) { return std::to_string(a.a) + sep + std::to_string(a.b); };
  switch (a.kind) {
    case ActionKind::kStop:
      return "STOP";
    case ActionKind::kSwap:
      return "SWAP:" + pair('-');
    case ActionKind::kTeleQubit:
      return "TQ:" + pair('-');
    case ActionKind::kGenerate:
      return "GEN:" + pair('-');
    case ActionKind::kRout:
      return "ROUT:" + pair('>');
  }
  return "?";
}

Action parse_action(std::string_view text) {
  if (text == "STOP") return Action::stop();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ValidationError("malformed action '" + std::string(text) + "'");
  const auto kind = text.substr(0, colon);
  const auto args = text.substr(colon + 1);
  const char sep = kind == "ROUT" ? '>' : '-';
  const auto split = args.find(sep);
  int x = -1, y = -1;
  auto parse_int = [&](std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  if (split == std::string_view::npos || !parse_int(args.substr(0, split), x) ||
      !parse_int(args.substr(split + 1), y)) {
    throw ValidationError("malformed action '" + std::string(text) + "'");
  }
  if (kind == "SWAP") return Action::swap(Edge(x, y));
  if (kind == "TQ") return Action::telequbit(Edge(x, y));
  if (kind == "GEN") return Action::generate(Edge(x, y));
  if (kind == "ROUT") return Action::rout(x, y);
  throw ValidationError("unknown action kind '" + std::string(kind) + "'");
}

ActionSpace::ActionSpace(const CouplingGraph& g, AgentMode mode)
    : mode_(mode),
      num_qubits_(g.num_qubits()),
      num_local_(static_cast<int>(g.local_edges().size())),
      num_channels_(static_cast<int>(g.channels().size())),
      local_edges_(g.local_edges()),
      channels_(g.channels()) {
  if (mode_ == AgentMode::kBaseline) {
    size_ = 1 + 2 * num_channels_ + num_local_;
    num_heads_ = size_;
  } else {
    size_ = 1 + num_channels_ + num_qubits_ * (num_qubits_ - 1);
    num_heads_ = 1 + num_channels_ + num_qubits_;
  }
}

Action ActionSpace::action(int index) const {
  if (index < 0 || index >= size_) throw ContractViolation("action index out of range");
  if (index == 0) return Action::stop();
  if (mode_ == AgentMode::kBaseline) {
    int k = index - 1;
    if (k < num_local_) return Action::swap(local_edges_[k]);
    k -= num_local_;
    if (k < num_channels_) return Action::telequbit(channels_[k]);
    return Action::generate(channels_[k - num_channels_]);
  }
  int k = index - 1;
  const int num_rout = num_qubits_ * (num_qubits_ - 1);
  if (k < num_rout) {
    const int i = k / (num_qubits_ - 1);
    int j = k % (num_qubits_ - 1);
    if (j >= i) ++j;
    return Action::rout(i, j);
  }
  return Action::generate(channels_[k - num_rout]);
}

int ActionSpace::rout_index(int i, int j) const {
  if (mode_ != AgentMode::kRout || i == j || i < 0 || j < 0 || i >= num_qubits_ || j >= num_qubits_) {
    throw ContractViolation("ROUT(" + std::to_string(i) + "," + std::to_string(j) + ") not in alphabet");
  }
  return 1 + i * (num_qubits_ - 1) + (j < i ? j : j - 1);
}

int ActionSpace::generate_index(int channel) const {
  if (mode_ == AgentMode::kBaseline) return 1 + num_local_ + num_channels_ + channel;
  return 1 + num_qubits_ * (num_qubits_ - 1) + channel;
}

int ActionSpace::index(const Action& a) const {
  auto find = [&](const std::vector<Edge>& edges) {
    auto it = std::find(edges.begin(), edges.end(), Edge(a.a, a.b));
    if (it == edges.end()) throw ContractViolation(to_string(a) + " not in alphabet");
    return static_cast<int>(it - edges.begin());
  };
  switch (a.kind) {
    case ActionKind::kStop:
      return 0;
    case ActionKind::kGenerate:
      return generate_index(find(channels_));
    case ActionKind::kRout:
      return rout_index(a.a, a.b);
    case ActionKind::kSwap:
      if (mode_ != AgentMode::kBaseline) break;
      return 1 + find(local_edges_);
    case ActionKind::kTeleQubit:
      if (mode_ != AgentMode::kBaseline) break;
      return 1 + num_local_ + find(channels_);
  }
  throw ContractViolation(to_string(a) + " not in the " + std::string(to_string(mode_)) + " alphabet");
}

namespace {

// For every physical qubit holding a frontier virtual qubit, the holder of
// its gate partner; -1 elsewhere.
std::vector<int> partner_holders(const EnvState& s) {
  std::vector<int> partner(s.num_qubits(), -1);
  for (const auto& gate : s.dag.frontier()) {
    const int hx = s.holder_of(gate.control);
    const int hy = s.holder_of(gate.target);
    if (hx < 0 || hy < 0) continue;
    partner[hx] = hy;
    partner[hy] = hx;
  }
  return partner;
}

struct RoutTarget {
  int target;
  RoutClass cls;
};

// Targets towards which the content of qubit i may be routed, in class
// order. ROUT(i, j) is in class c iff j lies on the frozen path to one of
// the class-c targets.
std::vector<RoutTarget> rout_targets(const ActionContext& ctx, const EnvState& s,
                                     const std::vector<int>& partner, int i) {
  const auto& g = ctx.graph;
  const auto& paths = ctx.paths;
  std::vector<RoutTarget> out;
  const int content = s.mapping[i];
  const int module = g.module_of(i);
  if (content >= 0) {
    const int p = partner[i];
    if (p < 0) return out;
    if (paths.hops(i, p) >= 2) out.push_back({p, RoutClass::kFrontierToPartner});
    if (g.module_of(p) != module) {
      for (const auto& e : s.epr_pairs) {
        for (int half : {e.a, e.b}) {
          const int other = e.other(half);
          if (g.module_of(half) == module && g.module_of(other) == g.module_of(p) && paths.hops(i, half) >= 2) {
            out.push_back({half, RoutClass::kEprFrontierMeet});
          }
        }
      }
    }
  } else if (content == kEmpty) {
    for (int c = 0; c < g.num_qubits(); ++c) {
      if (c != i && g.is_channel_endpoint(c) && g.module_of(c) == module && s.holds_virtual(c)) {
        out.push_back({c, RoutClass::kEmptyToChannel});
      }
    }
  } else {
    const int other = s.epr_partner(i);
    if (other < 0) return out;
    for (int f = 0; f < g.num_qubits(); ++f) {
      const int p = partner[f];
      if (p < 0 || g.module_of(f) != module || g.module_of(p) != g.module_of(other)) continue;
      if (paths.hops(i, f) >= 2) out.push_back({f, RoutClass::kEprFrontierMeet});
    }
  }
  return out;
}

bool on_path(const PathTable& paths, int from, int to, int j) {
  const auto path = paths.path(from, to);
  return std::find(path.begin() + 1, path.end(), j) != path.end();
}

}  // namespace

std::optional<RoutClass> classify_rout(const ActionContext& ctx, const EnvState& s, int i, int j) {
  const int n = ctx.graph.num_qubits();
  if (i == j || i < 0 || j < 0 || i >= n || j >= n) return std::nullopt;
  const auto partner = partner_holders(s);
  for (const auto& t : rout_targets(ctx, s, partner, i)) {
    if (on_path(ctx.paths, i, t.target, j)) return t.cls;
  }
  return std::nullopt;
}

std::vector<Op> try_expand_rout(const ActionContext& ctx, const QubitLayout& s, int i, int j) {
  const auto& g = ctx.graph;
  const auto path = ctx.paths.path(i, j);
  const bool moves_virtual = s.holds_virtual(i);
  QubitLayout sim = s;
  std::vector<Op> ops;
  const auto size = path.size();
  std::size_t k = 0;
  while (k + 1 < size) {
    const int cur = path[k];
    const int nxt = path[k + 1];
    const bool channel_after = k + 2 < size && g.is_channel(nxt, path[k + 2]);
    std::optional<Op> op;
    std::size_t advance = 1;
    if (g.is_local_edge(cur, nxt)) {
      if (channel_after) {
        // only step next to the channel if a live pair lets us jump it
        if (!moves_virtual || sim.epr_partner(nxt) != path[k + 2]) break;
        op = Op::telequbit(cur, nxt, path[k + 2]);
        advance = 2;
      } else {
        op = Op::swap(cur, nxt);
      }
    } else {
      if (!moves_virtual) break;
      for (int near : g.local_neighbors(cur)) {
        if (sim.epr_partner(near) == nxt) {
          op = Op::telequbit(cur, near, nxt);
          break;
        }
      }
      if (!op) break;
    }
    const bool first = ops.empty();
    if (check_op(g, sim, *op, first)) {
      if (first) return {};
      break;
    }
    schedule_op(g, ctx.config.timing, sim, *op, first);
    ops.push_back(*op);
    k += advance;
  }
  return ops;
}

std::vector<Op> expand_rout(const ActionContext& ctx, const QubitLayout& s, int i, int j) {
  auto ops = try_expand_rout(ctx, s, i, j);
  if (ops.empty()) {
    throw ContractViolation("ROUT:" + std::to_string(i) + ">" + std::to_string(j) + " has no executable chain");
  }
  return ops;
}

std::optional<Op> baseline_telequbit(const ActionContext& ctx, const EnvState& s, Edge channel) {
  const auto& g = ctx.graph;
  if (std::find(s.epr_pairs.begin(), s.epr_pairs.end(), channel) == s.epr_pairs.end()) return std::nullopt;
  if (!s.is_idle(channel.a) || !s.is_idle(channel.b)) return std::nullopt;
  const auto partner = partner_holders(s);
  std::optional<Op> best;
  bool best_preferred = false;
  for (int near : {channel.a, channel.b}) {
    const int far = channel.other(near);
    for (int src : g.local_neighbors(near)) {
      if (!s.holds_virtual(src) || !s.is_idle(src)) continue;
      const bool preferred = partner[src] >= 0 && g.module_of(partner[src]) == g.module_of(far);
      if (!best || (preferred && !best_preferred) || (preferred == best_preferred && src < best->a)) {
        best = Op::telequbit(src, near, far);
        best_preferred = preferred;
      }
    }
  }
  return best;
}

ActionMask baseline_mask(const ActionContext& ctx, const EnvState& s) {
  const auto& g = ctx.graph;
  const auto& space = ctx.space;
  ActionMask mask(space.size(), false);
  mask[0] = true;
  for (const auto& e : g.local_edges()) {
    if (s.is_idle(e.a) && s.is_idle(e.b)) mask[space.index(Action::swap(e))] = true;
  }
  for (const auto& e : g.channels()) {
    if (baseline_telequbit(ctx, s, e)) mask[space.index(Action::telequbit(e))] = true;
    if (!check_op(g, s, Op::generate(e.a, e.b), true)) mask[space.index(Action::generate(e))] = true;
  }
  return mask;
}

ActionMask rout_mask(const ActionContext& ctx, const EnvState& s) {
  const auto& g = ctx.graph;
  const auto& space = ctx.space;
  ActionMask mask(space.size(), false);
  mask[0] = true;
  for (int c = 0; c < static_cast<int>(g.channels().size()); ++c) {
    const auto& e = g.channels()[c];
    if (!check_op(g, s, Op::generate(e.a, e.b), true)) mask[space.generate_index(c)] = true;
  }
  const auto partner = partner_holders(s);
  for (int i = 0; i < g.num_qubits(); ++i) {
    if (!s.is_idle(i)) continue;
    for (const auto& t : rout_targets(ctx, s, partner, i)) {
      const auto path = ctx.paths.path(i, t.target);
      for (std::size_t k = 1; k < path.size(); ++k) {
        const int idx = space.rout_index(i, path[k]);
        if (!mask[idx] && !try_expand_rout(ctx, s, i, path[k]).empty()) mask[idx] = true;
      }
    }
  }
  return mask;
}

ActionMask compute_mask(const ActionContext& ctx, const EnvState& s) {
  return ctx.space.mode() == AgentMode::kBaseline ? baseline_mask(ctx, s) : rout_mask(ctx, s);
}

std::vector<Op> to_env_ops(const ActionContext& ctx, const EnvState& s, const Action& a) {
  const auto& g = ctx.graph;
  switch (a.kind) {
    case ActionKind::kStop:
      return {};
    case ActionKind::kSwap:
      if (!g.is_local_edge(a.a, a.b)) throw ContractViolation(to_string(a) + ": not a local edge");
      return {Op::swap(a.a, a.b)};
    case ActionKind::kGenerate:
      if (!g.is_channel(a.a, a.b)) throw ContractViolation(to_string(a) + ": not a quantum channel");
      return {Op::generate(a.a, a.b)};
    case ActionKind::kTeleQubit: {
      if (!g.is_channel(a.a, a.b)) throw ContractViolation(to_string(a) + ": not a quantum channel");
      auto op = baseline_telequbit(ctx, s, Edge(a.a, a.b));
      if (!op) throw ContractViolation(to_string(a) + ": no teleportable qubit next to a live pair");
      return {*op};
    }
    case ActionKind::kRout:
      return expand_rout(ctx, s, a.a, a.b);
  }
  return {};
}

bool is_admissible(const ActionContext& ctx, const EnvState& s, const Action& a) {
  const auto& g = ctx.graph;
  int index = -1;
  try {
    index = ctx.space.index(a);
  } catch (const ContractViolation&) {
    return false;
  }
  (void)index;
  switch (a.kind) {
    case ActionKind::kStop:
      return true;
    case ActionKind::kSwap:
      return s.is_idle(a.a) && s.is_idle(a.b);
    case ActionKind::kGenerate:
      return !check_op(g, s, Op::generate(a.a, a.b), true);
    case ActionKind::kTeleQubit:
      return baseline_telequbit(ctx, s, Edge(a.a, a.b)).has_value();
    case ActionKind::kRout:
      return s.is_idle(a.a) && classify_rout(ctx, s, a.a, a.b).has_value() &&
             !try_expand_rout(ctx, s, a.a, a.b).empty();
  }
  return false;
}

}  // namespace dqcr
