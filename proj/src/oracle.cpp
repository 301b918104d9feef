// SPDX-License-Identifier: Apache-2.0
#include "dqcr/oracle.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "dqcr/errors.hpp"
#include "dqcr/rng.hpp"

namespace dqcr {

std::string to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::kOptimal: return "optimal";
    case OracleStatus::kExceedsLimit: return "exceeds_limit";
    case OracleStatus::kUnreachable: return "unreachable";
  }
  return "?";
}

namespace {

// Everything the future depends on, with clocks taken relative to now.
std::vector<int> state_key(const EnvState& s) {
  std::vector<int> key;
  const int n = s.num_qubits();
  key.reserve(3 * n + 2 * s.epr_pairs.size() + s.dag.num_gates_total() + 2);
  key.insert(key.end(), s.mapping.begin(), s.mapping.end());
  for (int q = 0; q < n; ++q) key.push_back(std::max(s.busy_until[q] - s.now, 0));
  key.push_back(-7);
  for (const auto& e : s.epr_pairs) {
    key.push_back(e.a);
    key.push_back(e.b);
  }
  key.push_back(-7);
  for (bool r : s.dag.removed()) key.push_back(r ? 1 : 0);
  key.push_back(std::max(s.last_gate_done - s.now, 0));
  return key;
}

struct KeyHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (int x : v) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

// Admissible lower bound on T. A qubit's content advances at most one hop
// per swap or two hops per teleport, a gate needs its holders adjacent
// (local) or three hops apart around a pair (remote), and a gate cannot end
// before its predecessors end plus the shortest gate duration.
class LowerBound {
 public:
  LowerBound(const CouplingGraph& g, const TimingConfig& t) : hops_(hop_distances(g)), t_(t) {
    speed_ = 2.0 * std::max(1.0 / t.t_swap, 2.0 / t.t_remote);
  }

  int operator()(const EnvState& s) const {
    const auto gates = s.dag.remaining();
    if (gates.empty()) return s.last_gate_done;
    const bool pair_live = !s.epr_pairs.empty();
    const int shortest = std::min(t_.t_local, t_.t_remote);
    std::vector<int> end(s.dag.num_gates_total(), 0);
    int best = s.last_gate_done;
    for (const auto& gate : gates) {
      const int hc = s.holder_of(gate.control);
      const int ht = s.holder_of(gate.target);
      const double d = hops_[hc][ht];
      const double start = std::max({s.now, s.busy_until[hc], s.busy_until[ht]});
      const double local = start + std::max(0.0, d - 1.0) / speed_ + t_.t_local;
      const double remote =
          std::max(start + std::max(0.0, d - 3.0) / speed_, static_cast<double>(s.now + (pair_live ? 0 : t_.t_gen))) +
          t_.t_remote;
      end[gate.id] = static_cast<int>(std::ceil(std::min(local, remote) - 1e-9));
    }
    for (const auto& [u, v] : s.dag.edges()) end[v] = std::max(end[v], end[u] + shortest);
    for (const auto& gate : gates) best = std::max(best, end[gate.id]);
    return best;
  }

 private:
  std::vector<std::vector<int>> hops_;
  TimingConfig t_;
  double speed_;
};

struct Node {
  int bound;
  std::uint64_t order;
  Environment env;
};

struct NodeAfter {
  bool operator()(const Node& x, const Node& y) const {
    if (x.bound != y.bound) return x.bound > y.bound;
    return x.order > y.order;
  }
};

void enumerate_placements(int num_virtual, int num_physical, std::vector<int>& cur, std::vector<bool>& used,
                          const std::function<void(const std::vector<int>&)>& emit) {
  const int v = static_cast<int>(std::count_if(cur.begin(), cur.end(), [](int x) { return x >= 0; }));
  if (v == num_virtual) {
    emit(cur);
    return;
  }
  for (int p = 0; p < num_physical; ++p) {
    if (used[p]) continue;
    used[p] = true;
    cur[p] = v;
    enumerate_placements(num_virtual, num_physical, cur, used, emit);
    cur[p] = kEmpty;
    used[p] = false;
  }
}

}  // namespace

OracleResult optimal_time(std::shared_ptr<const World> world, const CircuitDag& dag,
                          std::optional<std::vector<int>> mapping, const OracleLimits& limits) {
  const int horizon = limits.time_limit < 0 ? world->config().t_max : limits.time_limit;
  std::priority_queue<Node, std::vector<Node>, NodeAfter> open;
  // earliest clock at which each shift-invariant state was expanded
  std::unordered_map<std::vector<int>, int, KeyHash> expanded_at;
  const LowerBound lower_bound(world->graph(), world->config().timing);
  std::uint64_t order = 0;
  bool pruned = false;
  OracleResult result;
  std::optional<Rng> rng;
  if (limits.shuffle_seed) rng.emplace(*limits.shuffle_seed);

  auto push = [&](Environment env) {
    if (env.outcome() == Outcome::kFailure) return;
    const int b = env.outcome() == Outcome::kSuccess ? env.elapsed() : lower_bound(env.state());
    if (b > horizon) {
      pruned = true;
      return;
    }
    open.push(Node{b, order++, std::move(env)});
  };

  if (mapping) {
    Environment env(world);
    env.reset_with_mapping(dag, *mapping);
    push(std::move(env));
  } else {
    const int n = world->graph().num_qubits();
    if (dag.num_virtual_qubits() > n) throw ValidationError("circuit has more virtual qubits than the hardware");
    std::vector<int> cur(n, kEmpty);
    std::vector<bool> used(n, false);
    enumerate_placements(dag.num_virtual_qubits(), n, cur, used, [&](const std::vector<int>& m) {
      Environment env(world);
      env.reset_with_mapping(dag, m);
      push(std::move(env));
    });
  }

  std::vector<int> actions;
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.env.outcome() == Outcome::kSuccess) {
      result.status = OracleStatus::kOptimal;
      result.time = node.env.elapsed();
      return result;
    }
    auto [it, fresh] = expanded_at.try_emplace(state_key(node.env.state()), node.env.state().now);
    if (!fresh) {
      if (it->second <= node.env.state().now) continue;
      it->second = node.env.state().now;
    }
    if (result.expanded >= limits.max_states) {
      result.status = OracleStatus::kExceedsLimit;
      return result;
    }
    ++result.expanded;
    const auto mask = node.env.mask();
    actions.clear();
    for (int a = 0; a < static_cast<int>(mask.size()); ++a)
      if (mask[a]) actions.push_back(a);
    if (rng) rng->shuffle(actions);
    for (int a : actions) {
      Environment next = node.env;
      next.step_index(a);
      push(std::move(next));
    }
  }
  result.status = pruned ? OracleStatus::kExceedsLimit : OracleStatus::kUnreachable;
  return result;
}

RandomBaseline random_policy_baseline(std::shared_ptr<const World> world, const CircuitDag& dag,
                                      std::span<const std::uint64_t> seeds, std::optional<std::vector<int>> mapping) {
  RandomBaseline out;
  Environment env(world);
  int failures = 0;
  for (std::uint64_t seed : seeds) {
    Rng rng(derive_seed(seed, 1));
    if (mapping)
      env.reset_with_mapping(dag, *mapping);
    else
      env.reset(dag, derive_seed(seed, 0));
    while (!env.done()) {
      const auto mask = env.mask();
      std::vector<int> admissible;
      for (int a = 0; a < static_cast<int>(mask.size()); ++a)
        if (mask[a]) admissible.push_back(a);
      env.step_index(admissible[rng.uniform(admissible.size())]);
    }
    out.times.push_back(env.elapsed());
    if (env.outcome() != Outcome::kSuccess) ++failures;
  }
  out.runs = out.times.size();
  if (out.runs == 0) return out;
  double sum = 0.0;
  for (int t : out.times) sum += t;
  out.mean = sum / static_cast<double>(out.runs);
  double var = 0.0;
  for (int t : out.times) var += (t - out.mean) * (t - out.mean);
  out.std = std::sqrt(var / static_cast<double>(out.runs));
  out.failure_rate = static_cast<double>(failures) / static_cast<double>(out.runs);
  return out;
}

std::uint64_t instance_hash(const World& world, const CircuitDag& dag, const std::optional<std::vector<int>>& mapping,
                            const OracleLimits& limits) {
  const auto& g = world.graph();
  const auto& c = world.config();
  std::ostringstream os;
  os << "v1|" << g.num_qubits() << '|';
  for (const auto& e : g.local_edges()) os << e.a << '-' << e.b << ',';
  os << '|';
  for (const auto& e : g.channels()) os << e.a << '-' << e.b << ',';
  os << '|';
  for (int q = 0; q < g.num_qubits(); ++q) os << g.module_of(q) << ',';
  os << '|' << to_string(world.mode()) << '|' << world.path_seed() << '|' << c.t_max << ',' << c.timing.t_local << ','
     << c.timing.t_swap << ',' << c.timing.t_gen << ',' << c.timing.t_remote << '|' << dag.num_virtual_qubits() << '|';
  for (const auto& g : dag.remaining()) os << g.control << '>' << g.target << ',';
  os << '|';
  if (mapping)
    for (int m : *mapping) os << m << ',';
  else
    os << '*';
  os << '|' << limits.max_states << ',' << limits.time_limit;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string hex_key(std::uint64_t key) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, key);
  return buf;
}

}  // namespace

OracleCache::OracleCache(std::filesystem::path file) : file_(std::move(file)) {
  if (!std::filesystem::exists(file_)) return;
  std::ifstream in(file_);
  const auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.contains("entries")) throw ValidationError("malformed oracle cache: " + file_.string());
  for (const auto& [k, v] : doc["entries"].items()) {
    OracleResult r;
    const auto status = v.at("status").get<std::string>();
    r.status = status == "optimal"       ? OracleStatus::kOptimal
               : status == "unreachable" ? OracleStatus::kUnreachable
                                         : OracleStatus::kExceedsLimit;
    r.time = v.at("time").get<int>();
    r.expanded = v.at("expanded").get<std::size_t>();
    entries_[std::stoull(k, nullptr, 16)] = r;
  }
}

std::optional<OracleResult> OracleCache::find(std::uint64_t key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void OracleCache::put(std::uint64_t key, const OracleResult& result) { entries_[key] = result; }

void OracleCache::save() const {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["entries"] = nlohmann::ordered_json::object();
  for (const auto& [k, r] : entries_)
    doc["entries"][hex_key(k)] = {{"status", to_string(r.status)}, {"time", r.time}, {"expanded", r.expanded}};
  if (file_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file_.parent_path(), ec);
  }
  std::ofstream out(file_);
  if (!out) throw std::runtime_error("cannot write " + file_.string());
  out << doc.dump(2) << '\n';
}

}  // namespace dqcr
