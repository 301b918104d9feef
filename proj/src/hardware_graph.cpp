// SPDX-License-Identifier: Apache-2.0
#include "dqcr/hardware_graph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <set>

#include "dqcr/errors.hpp"
#include "dqcr/rng.hpp"

namespace dqcr {

CouplingGraph::CouplingGraph(int num_qubits, std::vector<Edge> local_edges, std::vector<Edge> channels,
                             std::vector<int> module_of, std::string name)
    : name_(std::move(name)),
      num_qubits_(num_qubits),
      local_edges_(std::move(local_edges)),
      channels_(std::move(channels)),
      module_of_(std::move(module_of)) {
  if (num_qubits_ < 1) throw ValidationError("coupling graph needs at least one qubit");
  if (static_cast<int>(module_of_.size()) != num_qubits_) {
    throw ValidationError("module_of must list one module per qubit");
  }
  std::set<int> module_ids;
  for (int m : module_of_) {
    if (m < 0) throw ValidationError("module ids must be non-negative");
    module_ids.insert(m);
  }
  num_modules_ = static_cast<int>(module_ids.size());

  kinds_.assign(static_cast<std::size_t>(num_qubits_) * num_qubits_, EdgeKind::kNone);
  channel_endpoint_.assign(num_qubits_, false);
  local_adj_.resize(num_qubits_);
  adj_.resize(num_qubits_);

  auto add = [&](const Edge& e, EdgeKind kind) {
    if (e.a < 0 || e.b >= num_qubits_) throw ValidationError("edge endpoint out of range");
    if (e.a == e.b) throw ValidationError("self-loop edge");
    if (kinds_[e.a * num_qubits_ + e.b] != EdgeKind::kNone) {
      throw ValidationError("duplicate edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                            "); local edges and channels must be disjoint");
    }
    const bool same_module = module_of_[e.a] == module_of_[e.b];
    if (kind == EdgeKind::kLocal && !same_module) {
      throw ValidationError("local edge crosses modules");
    }
    if (kind == EdgeKind::kChannel && same_module) {
      throw ValidationError("quantum channel inside one module");
    }
    kinds_[e.a * num_qubits_ + e.b] = kind;
    kinds_[e.b * num_qubits_ + e.a] = kind;
    adj_[e.a].push_back(e.b);
    adj_[e.b].push_back(e.a);
    if (kind == EdgeKind::kLocal) {
      local_adj_[e.a].push_back(e.b);
      local_adj_[e.b].push_back(e.a);
    } else {
      channel_endpoint_[e.a] = channel_endpoint_[e.b] = true;
    }
  };
  for (const auto& e : local_edges_) add(e, EdgeKind::kLocal);
  for (const auto& e : channels_) add(e, EdgeKind::kChannel);
  for (auto& v : adj_) std::sort(v.begin(), v.end());
  for (auto& v : local_adj_) std::sort(v.begin(), v.end());

  std::vector<bool> seen(num_qubits_, false);
  std::deque<int> queue{0};
  seen[0] = true;
  int reached = 1;
  while (!queue.empty()) {
    const int q = queue.front();
    queue.pop_front();
    for (int n : adj_[q]) {
      if (!seen[n]) {
        seen[n] = true;
        ++reached;
        queue.push_back(n);
      }
    }
  }
  if (reached != num_qubits_) throw ValidationError("coupling graph is not connected");
}

namespace {

std::vector<Edge> mirror(const std::vector<Edge>& edges, int offset) {
  std::vector<Edge> out = edges;
  for (const auto& e : edges) out.emplace_back(e.a + offset, e.b + offset);
  return out;
}

std::vector<int> two_modules(int per_module) {
  std::vector<int> m(2 * per_module, 0);
  std::fill(m.begin() + per_module, m.end(), 1);
  return m;
}

}  // namespace

CouplingGraph CouplingGraph::guadalupe_pair() {
  const std::vector<Edge> module{{1, 2},   {2, 3},   {3, 5},  {5, 8},  {8, 11}, {11, 14},
                                 {14, 13}, {13, 12}, {12, 10}, {10, 7}, {7, 4},  {4, 1},
                                 {6, 7},   {0, 1},   {8, 9},  {12, 15}};
  return CouplingGraph(32, mirror(module, 16), {{0, 16}}, two_modules(16), "guadalupe2");
}

CouplingGraph CouplingGraph::grid_pair() {
  std::vector<Edge> module;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const int q = r * 4 + c;
      if (c < 3) module.emplace_back(q, q + 1);
      if (r < 3) module.emplace_back(q, q + 4);
    }
  }
  return CouplingGraph(32, mirror(module, 16), {{0, 16}}, two_modules(16), "grid4x4x2");
}

CouplingGraph CouplingGraph::toy_pair() {
  const std::vector<Edge> module{{0, 1}, {1, 3}, {3, 2}, {2, 0}};
  return CouplingGraph(8, mirror(module, 4), {{1, 4}}, two_modules(4), "toy2x2x2");
}

CouplingGraph CouplingGraph::by_name(std::string_view name) {
  if (name == "guadalupe2") return guadalupe_pair();
  if (name == "grid4x4x2") return grid_pair();
  if (name == "toy2x2x2") return toy_pair();
  throw ValidationError("unknown topology '" + std::string(name) + "'");
}

int CouplingGraph::local_edge_index(int a, int b) const {
  const Edge e(a, b);
  auto it = std::find(local_edges_.begin(), local_edges_.end(), e);
  return it == local_edges_.end() ? -1 : static_cast<int>(it - local_edges_.begin());
}

int CouplingGraph::channel_index(int a, int b) const {
  const Edge e(a, b);
  auto it = std::find(channels_.begin(), channels_.end(), e);
  return it == channels_.end() ? -1 : static_cast<int>(it - channels_.begin());
}

std::vector<std::vector<int>> hop_distances(const CouplingGraph& g) {
  const int n = g.num_qubits();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (int s = 0; s < n; ++s) {
    auto& d = dist[s];
    d[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int q = queue.front();
      queue.pop_front();
      for (int nb : g.neighbors(q)) {
        if (d[nb] < 0) {
          d[nb] = d[q] + 1;
          queue.push_back(nb);
        }
      }
    }
  }
  return dist;
}

PathTable::PathTable(const CouplingGraph& g, std::uint64_t seed) : n_(g.num_qubits()) {
  hops_ = hop_distances(g);
  paths_.resize(static_cast<std::size_t>(n_) * n_);
  Rng rng(seed);
  for (int j = 0; j < n_; ++j) {
    // count[v] = number of shortest paths from v to j
    std::vector<double> count(n_, 0.0);
    std::vector<int> order(n_);
    for (int v = 0; v < n_; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return hops_[a][j] < hops_[b][j]; });
    count[j] = 1.0;
    for (int v : order) {
      if (v == j) continue;
      for (int nb : g.neighbors(v)) {
        if (hops_[nb][j] == hops_[v][j] - 1) count[v] += count[nb];
      }
    }
    for (int i = 0; i < n_; ++i) {
      if (i == j) continue;
      // walking forward and picking each next hop in proportion to the
      // number of completions samples uniformly over all shortest paths
      auto& path = paths_[i * n_ + j];
      path.push_back(i);
      int cur = i;
      while (cur != j) {
        std::vector<int> next;
        for (int nb : g.neighbors(cur)) {
          if (hops_[nb][j] == hops_[cur][j] - 1) next.push_back(nb);
        }
        double r = rng.uniform01() * count[cur];
        int chosen = next.back();
        for (int nb : next) {
          if (r < count[nb]) {
            chosen = nb;
            break;
          }
          r -= count[nb];
        }
        path.push_back(chosen);
        cur = chosen;
      }
    }
  }
}

std::span<const int> PathTable::path(int i, int j) const {
  if (i == j) throw ContractViolation("shortest_path requires distinct endpoints");
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw ContractViolation("shortest_path endpoint out of range");
  return paths_[i * n_ + j];
}

WeightedDistance::WeightedDistance(const CouplingGraph& g, std::span<const Edge> epr_edges,
                                   double channel_weight)
    : n_(g.num_qubits()), adj_(n_) {
  if (!(channel_weight > 1.0)) throw ContractViolation("channel weight must exceed 1");
  for (const auto& e : g.local_edges()) {
    adj_[e.a].emplace_back(e.b, 1.0);
    adj_[e.b].emplace_back(e.a, 1.0);
  }
  for (const auto& e : g.channels()) {
    adj_[e.a].emplace_back(e.b, channel_weight);
    adj_[e.b].emplace_back(e.a, channel_weight);
  }
  for (const auto& e : epr_edges) {
    adj_[e.a].emplace_back(e.b, 1.0);
    adj_[e.b].emplace_back(e.a, 1.0);
  }
}

double WeightedDistance::operator()(int from, int to) const {
  if (from == to) return 0.0;
  std::vector<double> dist(n_, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[from] = 0.0;
  heap.emplace(0.0, from);
  while (!heap.empty()) {
    const auto [d, q] = heap.top();
    heap.pop();
    if (q == to) return d;
    if (d > dist[q]) continue;
    for (const auto& [nb, w] : adj_[q]) {
      if (d + w < dist[nb]) {
        dist[nb] = d + w;
        heap.emplace(dist[nb], nb);
      }
    }
  }
  return dist[to];
}

}  // namespace dqcr
