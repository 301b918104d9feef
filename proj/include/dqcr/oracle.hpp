// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dqcr/circuit_dag.hpp"
#include "dqcr/environment.hpp"

namespace dqcr {

struct OracleLimits {
  std::size_t max_states = 2'000'000;  // expanded states before giving up
  int time_limit = -1;                 // horizon on T; negative means t_max
  // Visits successor actions in a shuffled order; the optimum must not
  // depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

enum class OracleStatus {
  kOptimal,
  kExceedsLimit,  // state budget or time horizon hit before a proof
  kUnreachable,   // every action sequence runs into the deadline
};

struct OracleResult {
  OracleStatus status = OracleStatus::kExceedsLimit;
  int time = -1;  // minimal T when kOptimal
  std::size_t expanded = 0;
};

std::string to_string(OracleStatus s);

// Minimal modeled execution time over all admissible action sequences of
// the world's alphabet, starting from `mapping`. Without a mapping every
// injective placement of the virtual qubits is a candidate start.
// A* over environment states with an admissible lower bound on T; a state
// reached again at a later clock with identical relative clocks is pruned.
OracleResult optimal_time(std::shared_ptr<const World> world, const CircuitDag& dag,
                          std::optional<std::vector<int>> mapping, const OracleLimits& limits = {});

struct RandomBaseline {
  std::size_t runs = 0;
  double mean = 0.0;
  double std = 0.0;
  double failure_rate = 0.0;
  std::vector<int> times;
};

// eps = 1 episodes, one per seed. Each seed also draws the placement unless
// `mapping` is given.
RandomBaseline random_policy_baseline(std::shared_ptr<const World> world, const CircuitDag& dag,
                                      std::span<const std::uint64_t> seeds,
                                      std::optional<std::vector<int>> mapping = std::nullopt);

// Stable 64-bit key of (hardware, alphabet, config, circuit, start, limits).
std::uint64_t instance_hash(const World& world, const CircuitDag& dag, const std::optional<std::vector<int>>& mapping,
                            const OracleLimits& limits);

// JSON file of results keyed by instance hash.
class OracleCache {
 public:
  explicit OracleCache(std::filesystem::path file);

  std::optional<OracleResult> find(std::uint64_t key) const;
  void put(std::uint64_t key, const OracleResult& result);
  // Throws std::runtime_error on I/O failure.
  void save() const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::filesystem::path file_;
  std::map<std::uint64_t, OracleResult> entries_;
};

}  // namespace dqcr
