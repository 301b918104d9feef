// SPDX-License-Identifier: Apache-2.0
#include "dqcr/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "dqcr/errors.hpp"

namespace dqcr {

void RewardTally::add(const StepResult& r) {
  score += r.reward.score;
  move += r.reward.move;
  stop += r.reward.stop;
  terminal += r.reward.terminal;
  deletes += r.deleted;
  skipped += r.skipped;
}

namespace {

std::vector<std::int16_t> narrow(const std::vector<int>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

EpisodeRecord run_episode(Environment& env, DdqnAgent& agent, const CircuitDag& dag, std::uint64_t reset_seed,
                          double eps, bool learn, int max_gates) {
  EpisodeRecord rec;
  rec.epsilon = eps;
  rec.tally.add(env.reset(dag, reset_seed));
  double loss_sum = 0.0;
  int loss_count = 0;
  auto state = encode_state(env.state(), max_gates);
  auto mask = env.done() ? ActionMask{} : env.mask();
  while (!env.done()) {
    const int a = agent.act(state, mask, eps);
    const auto result = env.step_index(a);
    if (a == 0) ++rec.tally.stops;
    rec.tally.add(result);
    ++rec.steps;
    auto next_state = encode_state(env.state(), max_gates);
    auto next_mask = env.done() ? ActionMask{} : env.mask();
    if (learn) {
      agent.remember({narrow(state), a, result.reward.total(), narrow(next_state), result.done, next_mask});
      if (auto loss = agent.observe_action()) {
        loss_sum += *loss;
        ++loss_count;
      }
    }
    state = std::move(next_state);
    mask = std::move(next_mask);
  }
  rec.reward = rec.tally.total();
  rec.elapsed = env.elapsed();
  rec.success = env.outcome() == Outcome::kSuccess;
  if (loss_count > 0) rec.mean_loss = loss_sum / loss_count;
  return rec;
}

EpisodeRecord run_random_episode(Environment& env, const CircuitDag& dag, std::uint64_t reset_seed, Rng& rng) {
  EpisodeRecord rec;
  rec.epsilon = 1.0;
  rec.tally.add(env.reset(dag, reset_seed));
  while (!env.done()) {
    const auto mask = env.mask();
    const auto admissible = std::count(mask.begin(), mask.end(), true);
    auto pick = static_cast<long>(rng.uniform(static_cast<std::uint64_t>(admissible)));
    int a = 0;
    for (int k = 0; k < static_cast<int>(mask.size()); ++k) {
      if (mask[k] && pick-- == 0) {
        a = k;
        break;
      }
    }
    if (a == 0) ++rec.tally.stops;
    rec.tally.add(env.step_index(a));
    ++rec.steps;
  }
  rec.reward = rec.tally.total();
  rec.elapsed = env.elapsed();
  rec.success = env.outcome() == Outcome::kSuccess;
  return rec;
}

std::vector<EpisodeRecord> train_agent(std::shared_ptr<const World> world, DdqnAgent& agent,
                                       std::span<const CircuitDag> circuits, const TrainOptions& options,
                                       const std::function<void(const EpisodeRecord&)>& on_episode) {
  if (circuits.empty()) throw ValidationError("training needs at least one circuit");
  Environment env(world);
  std::vector<EpisodeRecord> log;
  log.reserve(options.episodes);
  const auto& cfg = agent.config();
  for (int k = 0; k < options.episodes; ++k) {
    const double eps = epsilon(k, cfg.epsilon0, cfg.epsilon_decay);
    auto rec = run_episode(env, agent, circuits[k % circuits.size()], derive_seed(options.seed, k), eps, true,
                           options.max_gates);
    rec.episode = k;
    if (on_episode) on_episode(rec);
    log.push_back(std::move(rec));
  }
  return log;
}

std::vector<MovingStat> moving_average(std::span<const double> values, int window) {
  if (window < 1) throw ContractViolation("moving average window must be positive");
  std::vector<MovingStat> out;
  out.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t lo = k + 1 >= static_cast<std::size_t>(window) ? k + 1 - window : 0;
    const double n = static_cast<double>(k + 1 - lo);
    double sum = 0.0;
    for (std::size_t t = lo; t <= k; ++t) sum += values[t];
    const double mean = sum / n;
    double var = 0.0;
    for (std::size_t t = lo; t <= k; ++t) var += (values[t] - mean) * (values[t] - mean);
    out.push_back({static_cast<int>(k), mean, std::sqrt(var / n)});
  }
  return out;
}

std::vector<EvalRow> evaluate(std::shared_ptr<const World> world, const DdqnAgent& agent,
                              std::span<const CircuitDag> circuits, double eps, std::uint64_t seed, int max_gates,
                              int threads, std::vector<std::vector<TraceRow>>* traces) {
  std::vector<EvalRow> rows(circuits.size());
  if (traces) traces->assign(circuits.size(), {});
  auto work = [&](std::size_t begin, std::size_t stride) {
    Environment env(world);
    env.enable_trace(traces != nullptr);
    for (std::size_t c = begin; c < circuits.size(); c += stride) {
      Rng rng(derive_seed(seed, 2 * c + 1));
      env.reset(circuits[c], derive_seed(seed, 2 * c));
      while (!env.done()) {
        const auto state = encode_state(env.state(), max_gates);
        const auto heads = agent.heads(state);
        env.step_index(select_action(agent.layout(), heads, env.mask(), eps, rng));
      }
      rows[c] = {static_cast<int>(c), env.elapsed(), env.outcome() == Outcome::kSuccess};
      if (traces) (*traces)[c] = env.trace();
    }
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, static_cast<std::size_t>(t), static_cast<std::size_t>(threads));
  }
  return rows;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double x : v) var += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(var / n);
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  return s;
}

}  // namespace dqcr
