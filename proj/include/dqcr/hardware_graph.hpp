// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dqcr {

// Undirected edge stored with a < b.
struct Edge {
  int a = 0;
  int b = 0;

  Edge() = default;
  Edge(int x, int y) : a(x < y ? x : y), b(x < y ? y : x) {}

  bool touches(int q) const { return a == q || b == q; }
  int other(int q) const { return q == a ? b : a; }
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class EdgeKind { kNone, kLocal, kChannel };

// Physical architecture: qubits partitioned into modules, local couplings
// inside a module, quantum channels between modules. Immutable.
class CouplingGraph {
 public:
  // Validates: disjoint edge sets, local edges intra-module, channels
  // inter-module, no self loops or duplicates, connected. Throws
  // ValidationError otherwise.
  CouplingGraph(int num_qubits, std::vector<Edge> local_edges, std::vector<Edge> channels,
                std::vector<int> module_of, std::string name = "custom");

  // Two IBM Q Guadalupe modules joined by the channel (0, 16).
  static CouplingGraph guadalupe_pair();
  // Two 4x4 grids joined by the channel (0, 16).
  static CouplingGraph grid_pair();
  // Two 2x2 rings joined by the channel (1, 4); the small layout used for
  // the state-vector walkthrough and desk-scale training.
  static CouplingGraph toy_pair();
  // "guadalupe2", "grid4x4x2" or "toy2x2x2".
  static CouplingGraph by_name(std::string_view name);

  const std::string& name() const { return name_; }
  int num_qubits() const { return num_qubits_; }
  int num_modules() const { return num_modules_; }
  int module_of(int q) const { return module_of_.at(q); }
  const std::vector<int>& modules() const { return module_of_; }

  const std::vector<Edge>& local_edges() const { return local_edges_; }
  const std::vector<Edge>& channels() const { return channels_; }

  EdgeKind edge_kind(int a, int b) const { return kinds_[a * num_qubits_ + b]; }
  bool is_local_edge(int a, int b) const { return edge_kind(a, b) == EdgeKind::kLocal; }
  bool is_channel(int a, int b) const { return edge_kind(a, b) == EdgeKind::kChannel; }
  bool is_channel_endpoint(int q) const { return channel_endpoint_[q]; }

  // Index into local_edges() / channels(), or -1.
  int local_edge_index(int a, int b) const;
  int channel_index(int a, int b) const;

  const std::vector<int>& local_neighbors(int q) const { return local_adj_[q]; }
  // Local and channel neighbours, ascending.
  const std::vector<int>& neighbors(int q) const { return adj_[q]; }

 private:
  std::string name_;
  int num_qubits_ = 0;
  int num_modules_ = 0;
  std::vector<Edge> local_edges_;
  std::vector<Edge> channels_;
  std::vector<int> module_of_;
  std::vector<EdgeKind> kinds_;
  std::vector<bool> channel_endpoint_;
  std::vector<std::vector<int>> local_adj_;
  std::vector<std::vector<int>> adj_;
};

// All-pairs hop distances (local edges and channels both count one hop).
std::vector<std::vector<int>> hop_distances(const CouplingGraph& g);

// One frozen shortest path per ordered pair, hop-count metric. Among equal
// length paths one is drawn uniformly at build time from `seed`.
class PathTable {
 public:
  PathTable(const CouplingGraph& g, std::uint64_t seed);

  // Qubit sequence from i to j inclusive. Throws ContractViolation if i == j.
  std::span<const int> path(int i, int j) const;
  int hops(int i, int j) const { return hops_[i][j]; }
  int num_qubits() const { return n_; }

 private:
  int n_ = 0;
  std::vector<std::vector<int>> hops_;
  std::vector<std::vector<int>> paths_;
};

// Shortest-path distance between qubit pairs in the weighted graph G_s:
// local edges weigh 1, channels weigh `channel_weight`, and every extra
// edge (the two holders of a live EPR pair) weighs 1.
class WeightedDistance {
 public:
  WeightedDistance(const CouplingGraph& g, std::span<const Edge> epr_edges, double channel_weight);

  double operator()(int from, int to) const;

 private:
  int n_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
};

}  // namespace dqcr
