// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dqcr/agent.hpp"
#include "dqcr/circuit_dag.hpp"
#include "dqcr/environment.hpp"

namespace dqcr {

// Per-episode reward split, for auditing the total.
struct RewardTally {
  double score = 0.0;
  double move = 0.0;
  double stop = 0.0;
  double terminal = 0.0;
  int deletes = 0;
  int stops = 0;
  int skipped = 0;

  void add(const StepResult& r);
  double total() const { return score + move + stop + terminal; }
};

struct EpisodeRecord {
  int episode = 0;
  double reward = 0.0;
  int elapsed = 0;
  bool success = false;
  int steps = 0;
  double epsilon = 0.0;
  std::optional<double> mean_loss;
  RewardTally tally;
};

// observe -> mask -> select -> step -> store -> learn, until the episode
// ends. With `learn` unset the agent only acts.
EpisodeRecord run_episode(Environment& env, DdqnAgent& agent, const CircuitDag& dag, std::uint64_t reset_seed,
                          double eps, bool learn, int max_gates);

// Uniformly random admissible actions (the eps = 1 policy), no network.
EpisodeRecord run_random_episode(Environment& env, const CircuitDag& dag, std::uint64_t reset_seed, Rng& rng);

struct TrainOptions {
  int episodes = 250;
  std::uint64_t seed = 0;
  int max_gates = 0;
};

// One circuit per episode, iterating the set in order; reset seeds derive
// from options.seed and the episode index.
std::vector<EpisodeRecord> train_agent(std::shared_ptr<const World> world, DdqnAgent& agent,
                                       std::span<const CircuitDag> circuits, const TrainOptions& options,
                                       const std::function<void(const EpisodeRecord&)>& on_episode = {});

struct MovingStat {
  int episode = 0;
  double mean = 0.0;
  double std = 0.0;  // population std over the same window
};

// Trailing window ending at each episode (shorter at the start).
std::vector<MovingStat> moving_average(std::span<const double> values, int window = 10);

struct EvalRow {
  int circuit_id = 0;
  int time = 0;
  bool success = false;
};

// Runs a frozen agent over the circuits; each circuit gets its own RNG
// derived from (seed, index), so the output does not depend on `threads`.
std::vector<EvalRow> evaluate(std::shared_ptr<const World> world, const DdqnAgent& agent,
                              std::span<const CircuitDag> circuits, double eps, std::uint64_t seed, int max_gates,
                              int threads = 1, std::vector<std::vector<TraceRow>>* traces = nullptr);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0, std = 0.0, min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double success_rate = 0.0;
};

// Quartiles by linear interpolation between order statistics.
Summary summarize(std::span<const double> values);

}  // namespace dqcr
