// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>
#include <vector>

namespace dqcr {

// A CNOT between two virtual qubits. `layer` is the longest-path depth
// (1-based) among the gates still present in the DAG.
struct Gate {
  int id = 0;
  int control = 0;
  int target = 0;
  int layer = 1;

  friend bool operator==(const Gate&, const Gate&) = default;
};

using GateList = std::vector<std::pair<int, int>>;

// Precedence DAG over two-qubit gates. Edges are per-qubit last-writer
// edges, so gate ids (input order) are already a topological order.
class CircuitDag {
 public:
  CircuitDag() = default;

  // Throws ValidationError on out-of-range or repeated qubits.
  static CircuitDag build(int num_virtual_qubits, std::span<const std::pair<int, int>> gates);

  int num_virtual_qubits() const { return num_virtual_qubits_; }
  int num_gates_total() const { return static_cast<int>(gates_.size()); }
  int num_remaining() const { return remaining_; }
  bool empty() const { return remaining_ == 0; }

  bool contains(int id) const;
  const Gate& gate(int id) const;

  // Live gates in ascending id order.
  std::vector<Gate> remaining() const;
  // Live gates without live predecessors, ascending id.
  std::vector<Gate> frontier() const;
  bool in_frontier(int id) const;

  // Live precedence edges (u, v), sorted.
  std::vector<std::pair<int, int>> edges() const;

  // Removes a frontier gate and its incident edges, then relabels layers.
  // Throws ContractViolation if the gate is absent or not in the frontier.
  void delete_gate(int id);

  // Bitmap of removed gates, one entry per original gate.
  const std::vector<bool>& removed() const { return removed_; }

 private:
  void recompute_layers();

  int num_virtual_qubits_ = 0;
  int remaining_ = 0;
  std::vector<Gate> gates_;
  std::vector<bool> removed_;
  std::vector<std::vector<int>> preds_;
};

}  // namespace dqcr
