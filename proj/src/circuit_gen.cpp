// SPDX-License-Identifier: Apache-2.0
#include "dqcr/circuit_gen.hpp"

#include "dqcr/errors.hpp"
#include "dqcr/rng.hpp"

namespace dqcr {

void CircuitSetSpec::validate() const {
  if (num_circuits < 0) throw ValidationError("circuit count must be non-negative");
  if (num_virtual_qubits < 2) throw ValidationError("circuits need at least 2 virtual qubits");
  if (num_gates < 1) throw ValidationError("circuits need at least 1 gate");
}

std::uint64_t circuit_seed(const CircuitSetSpec& spec, int index) {
  return derive_seed(spec.seed, static_cast<std::uint64_t>(index));
}

GateList generate_gates(const CircuitSetSpec& spec, int index) {
  spec.validate();
  Rng rng(circuit_seed(spec, index));
  const auto n = static_cast<std::uint64_t>(spec.num_virtual_qubits);
  GateList gates;
  gates.reserve(spec.num_gates);
  for (int k = 0; k < spec.num_gates; ++k) {
    const int c = static_cast<int>(rng.uniform(n));
    int t = static_cast<int>(rng.uniform(n - 1));
    if (t >= c) ++t;
    gates.emplace_back(c, t);
  }
  return gates;
}

std::vector<CircuitDag> generate_set(const CircuitSetSpec& spec) {
  spec.validate();
  std::vector<CircuitDag> out;
  out.reserve(spec.num_circuits);
  for (int i = 0; i < spec.num_circuits; ++i)
    out.push_back(CircuitDag::build(spec.num_virtual_qubits, generate_gates(spec, i)));
  return out;
}

std::uint64_t test_set_seed(std::uint64_t train_seed) {
  std::uint64_t s = derive_seed(train_seed, 0x7e57ULL);
  if (s == train_seed) ++s;
  return s;
}

}  // namespace dqcr
