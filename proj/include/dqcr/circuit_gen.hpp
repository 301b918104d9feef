// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "dqcr/circuit_dag.hpp"

namespace dqcr {

struct CircuitSetSpec {
  int num_circuits = 250;
  int num_virtual_qubits = 18;
  int num_gates = 30;
  std::uint64_t seed = 0;

  // Throws ValidationError.
  void validate() const;
};

// Gate list of circuit `index`: i.i.d. ordered pairs (c, t), c != t, drawn
// uniformly with an RNG seeded by derive_seed(spec.seed, index).
GateList generate_gates(const CircuitSetSpec& spec, int index);
std::uint64_t circuit_seed(const CircuitSetSpec& spec, int index);

std::vector<CircuitDag> generate_set(const CircuitSetSpec& spec);

// Seed of the held-out companion set; never equal to the training seed.
std::uint64_t test_set_seed(std::uint64_t train_seed);

}  // namespace dqcr
