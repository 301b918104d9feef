// SPDX-License-Identifier: Apache-2.0
#include "dqcr/circuit_dag.hpp"

#include <algorithm>
#include <string>

#include "dqcr/errors.hpp"

namespace dqcr {

CircuitDag CircuitDag::build(int num_virtual_qubits, std::span<const std::pair<int, int>> gates) {
  if (num_virtual_qubits < 0) {
    throw ValidationError("negative virtual qubit count");
  }
  CircuitDag dag;
  dag.num_virtual_qubits_ = num_virtual_qubits;
  dag.remaining_ = static_cast<int>(gates.size());
  dag.gates_.reserve(gates.size());
  dag.removed_.assign(gates.size(), false);
  dag.preds_.resize(gates.size());

  std::vector<int> last_writer(num_virtual_qubits, -1);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto [control, target] = gates[i];
    const int id = static_cast<int>(i);
    if (control < 0 || control >= num_virtual_qubits || target < 0 || target >= num_virtual_qubits) {
      throw ValidationError("gate " + std::to_string(id) + " references qubit outside [0, " +
                            std::to_string(num_virtual_qubits) + ")");
    }
    if (control == target) {
      throw ValidationError("gate " + std::to_string(id) + " has control == target");
    }
    auto& preds = dag.preds_[i];
    for (int q : {control, target}) {
      if (last_writer[q] >= 0 && std::find(preds.begin(), preds.end(), last_writer[q]) == preds.end()) {
        preds.push_back(last_writer[q]);
      }
      last_writer[q] = id;
    }
    std::sort(preds.begin(), preds.end());
    dag.gates_.push_back(Gate{id, control, target, 1});
  }
  dag.recompute_layers();
  return dag;
}

bool CircuitDag::contains(int id) const {
  return id >= 0 && id < num_gates_total() && !removed_[id];
}

const Gate& CircuitDag::gate(int id) const {
  if (!contains(id)) {
    throw ContractViolation("gate " + std::to_string(id) + " is not in the DAG");
  }
  return gates_[id];
}

std::vector<Gate> CircuitDag::remaining() const {
  std::vector<Gate> out;
  out.reserve(remaining_);
  for (const auto& g : gates_) {
    if (!removed_[g.id]) out.push_back(g);
  }
  return out;
}

bool CircuitDag::in_frontier(int id) const {
  if (!contains(id)) return false;
  return std::none_of(preds_[id].begin(), preds_[id].end(), [&](int p) { return !removed_[p]; });
}

std::vector<Gate> CircuitDag::frontier() const {
  std::vector<Gate> out;
  for (const auto& g : gates_) {
    if (in_frontier(g.id)) out.push_back(g);
  }
  return out;
}

std::vector<std::pair<int, int>> CircuitDag::edges() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& g : gates_) {
    if (removed_[g.id]) continue;
    for (int p : preds_[g.id]) {
      if (!removed_[p]) out.emplace_back(p, g.id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void CircuitDag::delete_gate(int id) {
  if (!contains(id)) {
    throw ContractViolation("cannot delete gate " + std::to_string(id) + ": not in the DAG");
  }
  if (!in_frontier(id)) {
    throw ContractViolation("cannot delete gate " + std::to_string(id) + ": not in the frontier");
  }
  removed_[id] = true;
  --remaining_;
  recompute_layers();
}

void CircuitDag::recompute_layers() {
  // ids are topologically ordered, one forward sweep suffices
  for (auto& g : gates_) {
    if (removed_[g.id]) continue;
    int depth = 0;
    for (int p : preds_[g.id]) {
      if (!removed_[p]) depth = std::max(depth, gates_[p].layer);
    }
    g.layer = depth + 1;
  }
}

}  // namespace dqcr
