// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "dqcr/agent.hpp"
#include "dqcr/circuit_gen.hpp"
#include "dqcr/environment.hpp"
#include "dqcr/errors.hpp"
#include "dqcr/io.hpp"
#include "dqcr/oracle.hpp"
#include "dqcr/training.hpp"

namespace {

using namespace dqcr;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DQCR_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("DQCR_SEED must be an unsigned integer");
  }
  return 0;
}

std::vector<int> parse_mapping(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ValidationError("bad mapping entry '" + item + "'");
    }
  }
  return out;
}

void ensure_output_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_directory(dir)) throw ValidationError(dir.string() + " is not a directory");
  if (fs::exists(dir) && !fs::is_empty(dir) && !force)
    throw ValidationError(dir.string() + " already exists; pass --force to overwrite");
  fs::create_directories(dir);
}

int max_gates_of(const std::vector<CircuitDag>& set) {
  int m = 0;
  for (const auto& c : set) m = std::max(m, c.num_gates_total());
  return m;
}

struct GenerateArgs {
  int gates = 30;
  int count = 250;
  int qubits = 18;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string test_out;
  bool force = false;
};

int run_generate(const GenerateArgs& a) {
  CircuitSetSpec spec{a.count, a.qubits, a.gates, resolve_seed(a.seed)};
  write_circuit_set(a.out, spec, a.force);
  std::printf("wrote %d circuits to %s\n", spec.num_circuits, a.out.c_str());
  if (!a.test_out.empty()) {
    CircuitSetSpec test = spec;
    test.seed = test_set_seed(spec.seed);
    write_circuit_set(a.test_out, test, a.force);
    std::printf("wrote %d held-out circuits to %s\n", test.num_circuits, a.test_out.c_str());
  }
  return kExitOk;
}

struct TrainArgs {
  std::string agent = "rout";
  std::string topology = "guadalupe2";
  std::string set;
  int episodes = 250;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_gates;
  std::optional<int> t_max;
  std::optional<double> alpha;
  std::optional<double> learning_rate;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> buffer_size;
  std::optional<int> hidden1;
  std::optional<int> hidden2;
  std::optional<double> epsilon_decay;
  bool force = false;
};

int run_train(const TrainArgs& a) {
  EnvConfig env;
  AgentConfig agent_cfg;
  if (!a.config.empty()) {
    const auto doc = read_json(a.config);
    if (!doc.is_object()) throw ValidationError("config file must be a JSON object");
    for (const auto& [k, v] : doc.items())
      if (k != "env" && k != "agent") throw ValidationError("unknown key '" + k + "' in config file");
    if (doc.contains("env")) merge_env_config(doc.at("env"), env);
    if (doc.contains("agent")) merge_agent_config(doc.at("agent"), agent_cfg);
  }
  if (a.t_max) env.t_max = *a.t_max;
  if (a.alpha) agent_cfg.alpha = *a.alpha;
  if (a.learning_rate) agent_cfg.learning_rate = *a.learning_rate;
  if (a.batch_size) agent_cfg.batch_size = *a.batch_size;
  if (a.buffer_size) agent_cfg.buffer_size = *a.buffer_size;
  if (a.hidden1) agent_cfg.hidden1 = *a.hidden1;
  if (a.hidden2) agent_cfg.hidden2 = *a.hidden2;
  if (a.epsilon_decay) agent_cfg.epsilon_decay = *a.epsilon_decay;
  env.validate();
  agent_cfg.validate();
  if (a.episodes < 0) throw ValidationError("--episodes must be non-negative");

  const auto circuits = load_circuit_set(a.set);
  if (circuits.empty()) throw ValidationError("circuit set is empty");
  const int max_gates = a.max_gates.value_or(max_gates_of(circuits));
  if (max_gates < max_gates_of(circuits)) throw ValidationError("--max-gates is smaller than the largest circuit");
  const std::uint64_t seed = resolve_seed(a.seed);
  auto world = std::make_shared<const World>(load_topology(a.topology), env, parse_agent_mode(a.agent),
                                             derive_seed(seed, 1));
  for (const auto& c : circuits)
    if (c.num_virtual_qubits() > world->graph().num_qubits())
      throw ValidationError("circuit set needs more qubits than the topology has");

  ensure_output_dir(a.out, a.force);
  const fs::path out(a.out);
  DdqnAgent agent(world->space(), state_size(world->graph().num_qubits(), max_gates), agent_cfg,
                  derive_seed(seed, 2));
  const auto started = std::chrono::steady_clock::now();
  const auto log = train_agent(world, agent, circuits, {a.episodes, derive_seed(seed, 3), max_gates},
                               [](const EpisodeRecord& r) {
                                 std::fprintf(stderr, "episode %d reward %.1f T %d %s\n", r.episode, r.reward,
                                              r.elapsed, r.success ? "success" : "failure");
                               });
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::vector<double> times, rewards;
  for (const auto& r : log) {
    times.push_back(r.elapsed);
    rewards.push_back(r.reward);
  }
  write_text(out / "train.csv", train_log_csv(log));
  write_text(out / "moving_time.csv", moving_average_csv(moving_average(times, 10)));
  write_text(out / "moving_reward.csv", moving_average_csv(moving_average(rewards, 10)));
  write_json(out / "checkpoint.json", checkpoint_to_json(*world, agent, max_gates));
  write_text(out / "wall_time.txt", format_number(wall) + "\n");
  std::fprintf(stderr, "trained %d episodes in %.1f s\n", a.episodes, wall);
  return kExitOk;
}

struct EvalArgs {
  std::string checkpoint;
  std::string set;
  std::string out;
  std::string topology;
  double epsilon = 0.0;
  int threads = 1;
  std::string trace_dir;
  std::optional<std::uint64_t> seed;
  bool force = false;
};

int run_eval(const EvalArgs& a) {
  if (a.epsilon < 0.0 || a.epsilon > 1.0) throw ValidationError("--epsilon must lie in [0, 1]");
  if (a.threads < 1) throw ValidationError("--threads must be positive");
  const auto cp = checkpoint_from_json(read_json(a.checkpoint));
  if (!a.topology.empty()) {
    const auto g = load_topology(a.topology);
    if (graph_to_json(g) != graph_to_json(cp.world->graph()))
      throw ValidationError("checkpoint was trained on a different topology");
  }
  const auto circuits = load_circuit_set(a.set);
  if (max_gates_of(circuits) > cp.max_gates)
    throw ValidationError("circuit set has more gates than the checkpoint layout holds");
  const auto agent = restore_agent(cp);
  std::vector<std::vector<TraceRow>> traces;
  const auto rows = evaluate(cp.world, agent, circuits, a.epsilon, resolve_seed(a.seed), cp.max_gates, a.threads,
                             a.trace_dir.empty() ? nullptr : &traces);
  ensure_output_dir(a.out, a.force);
  const fs::path out(a.out);
  std::vector<double> times;
  int successes = 0;
  for (const auto& r : rows) {
    times.push_back(r.time);
    successes += r.success ? 1 : 0;
  }
  auto summary = summarize(times);
  summary.success_rate = rows.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(rows.size());
  write_text(out / "eval.csv", eval_csv(rows));
  write_text(out / "summary.csv", summary_csv(summary));
  if (!a.trace_dir.empty()) {
    for (std::size_t c = 0; c < traces.size(); ++c) {
      char name[32];
      std::snprintf(name, sizeof name, "trace_%04zu.csv", c);
      write_text(fs::path(a.trace_dir) / name, trace_csv(traces[c]));
    }
  }
  std::printf("mean T %s, median %s, success rate %s over %zu circuits\n", format_number(summary.mean).c_str(),
              format_number(summary.median).c_str(), format_number(summary.success_rate).c_str(), rows.size());
  return kExitOk;
}

struct OracleArgs {
  std::string topology = "toy2x2x2";
  std::string agent = "baseline";
  std::string circuit;
  std::string mapping;
  std::size_t max_states = 2'000'000;
  int time_limit = -1;
  int t_max = 1500;
  std::string cache;
  int random_runs = 0;
  std::optional<std::uint64_t> seed;
};

int run_oracle(const OracleArgs& a) {
  EnvConfig env;
  env.t_max = a.t_max;
  const std::uint64_t seed = resolve_seed(a.seed);
  auto world = std::make_shared<const World>(load_topology(a.topology), env, parse_agent_mode(a.agent),
                                             derive_seed(seed, 1));
  const auto dag = circuit_from_json(read_json(a.circuit));
  std::optional<std::vector<int>> mapping;
  if (!a.mapping.empty()) mapping = parse_mapping(a.mapping);
  OracleLimits limits;
  limits.max_states = a.max_states;
  limits.time_limit = a.time_limit;

  std::optional<OracleCache> cache;
  if (!a.cache.empty()) cache.emplace(a.cache);
  const auto key = instance_hash(*world, dag, mapping, limits);
  std::optional<OracleResult> result;
  if (cache) result = cache->find(key);
  const bool cached = result.has_value();
  if (!result) result = optimal_time(world, dag, mapping, limits);
  if (cache && !cached) {
    cache->put(key, *result);
    cache->save();
  }
  Json doc = {{"status", to_string(result->status)},
              {"time", result->time},
              {"expanded", result->expanded},
              {"cached", cached}};
  if (a.random_runs > 0) {
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < a.random_runs; ++k) seeds.push_back(derive_seed(seed, 100 + k));
    const auto rb = random_policy_baseline(world, dag, seeds, mapping);
    doc["random"] = {{"runs", rb.runs}, {"mean", rb.mean}, {"std", rb.std}, {"failure_rate", rb.failure_rate}};
  }
  std::printf("%s\n", doc.dump().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed quantum circuit routing: circuit sets, DDQN training, evaluation and an exact oracle"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a random circuit set");
  g->add_option("--gates", gen.gates, "CNOTs per circuit")->required();
  g->add_option("--count", gen.count, "Number of circuits")->capture_default_str();
  g->add_option("--qubits", gen.qubits, "Virtual qubits per circuit")->capture_default_str();
  g->add_option("--seed", gen.seed, "Seed (falls back to DQCR_SEED, then 0)");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--test-out", gen.test_out, "Also write a held-out set with a disjoint seed here");
  g->add_flag("--force", gen.force, "Overwrite existing output");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a DDQN agent on a circuit set");
  t->add_option("--agent", tr.agent, "rout or baseline")
      ->check(CLI::IsMember({"rout", "baseline"}))
      ->capture_default_str();
  t->add_option("--topology", tr.topology, "guadalupe2, grid4x4x2, toy2x2x2 or a graph JSON file")
      ->capture_default_str();
  t->add_option("--set", tr.set, "Circuit set directory")->required();
  t->add_option("--episodes", tr.episodes, "Training episodes")->capture_default_str();
  t->add_option("--config", tr.config, "JSON file with 'env' and 'agent' sections");
  t->add_option("--out", tr.out, "Output directory")->required();
  t->add_option("--seed", tr.seed, "Seed (falls back to DQCR_SEED, then 0)");
  t->add_option("--max-gates", tr.max_gates, "Gate slots in the state vector (default: largest circuit)");
  t->add_option("--t-max", tr.t_max, "Episode deadline in timesteps");
  t->add_option("--alpha", tr.alpha, "Induced-Q weight of the target qubit");
  t->add_option("--learning-rate", tr.learning_rate, "Adam step size");
  t->add_option("--batch-size", tr.batch_size, "Replay batch size");
  t->add_option("--buffer-size", tr.buffer_size, "Replay capacity");
  t->add_option("--hidden1", tr.hidden1, "First hidden width");
  t->add_option("--hidden2", tr.hidden2, "Second hidden width");
  t->add_option("--epsilon-decay", tr.epsilon_decay, "Exploration decay constant");
  t->add_flag("--force", tr.force, "Overwrite existing output");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Run a trained checkpoint over a circuit set");
  e->add_option("--checkpoint", ev.checkpoint, "checkpoint.json from train")->required();
  e->add_option("--set", ev.set, "Circuit set directory")->required();
  e->add_option("--out", ev.out, "Output directory")->required();
  e->add_option("--topology", ev.topology, "Reject the checkpoint unless it matches this topology");
  e->add_option("--epsilon", ev.epsilon, "Exploration rate during evaluation")->capture_default_str();
  e->add_option("--threads", ev.threads, "Worker threads")->capture_default_str();
  e->add_option("--trace-dir", ev.trace_dir, "Write one action trace CSV per circuit here");
  e->add_option("--seed", ev.seed, "Seed (falls back to DQCR_SEED, then 0)");
  e->add_flag("--force", ev.force, "Overwrite existing output");

  OracleArgs orc;
  auto* o = app.add_subcommand("oracle", "Exact minimal execution time of a tiny instance");
  o->add_option("--topology", orc.topology, "Topology name or graph JSON file")->capture_default_str();
  o->add_option("--agent", orc.agent, "Action alphabet: rout or baseline")
      ->check(CLI::IsMember({"rout", "baseline"}))
      ->capture_default_str();
  o->add_option("--circuit", orc.circuit, "Circuit JSON file")->required();
  o->add_option("--mapping", orc.mapping, "Comma-separated start placement (-1 for empty); default: all placements");
  o->add_option("--max-states", orc.max_states, "Expanded-state budget")->capture_default_str();
  o->add_option("--time-limit", orc.time_limit, "Horizon on T (negative: episode deadline)")->capture_default_str();
  o->add_option("--t-max", orc.t_max, "Episode deadline")->capture_default_str();
  o->add_option("--cache", orc.cache, "JSON result cache file");
  o->add_option("--random-runs", orc.random_runs, "Also sample this many random-policy episodes");
  o->add_option("--seed", orc.seed, "Seed (falls back to DQCR_SEED, then 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return run_generate(gen);
    if (*t) return run_train(tr);
    if (*e) return run_eval(ev);
    if (*o) return run_oracle(orc);
  } catch (const ValidationError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitValidation;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
