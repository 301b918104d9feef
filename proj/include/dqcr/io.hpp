// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dqcr/agent.hpp"
#include "dqcr/circuit_dag.hpp"
#include "dqcr/circuit_gen.hpp"
#include "dqcr/environment.hpp"
#include "dqcr/training.hpp"

namespace dqcr {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Whole-file helpers. Throw std::runtime_error on I/O failure and
// ValidationError on malformed JSON.
std::string read_text(const fs::path& file);
void write_text(const fs::path& file, const std::string& text);
Json read_json(const fs::path& file);
void write_json(const fs::path& file, const Json& doc);

// {"num_virtual_qubits": n, "gates": [[c, t], ...]}; a bare gate array is
// also accepted, with n taken from the largest index.
Json circuit_to_json(int num_virtual_qubits, std::span<const std::pair<int, int>> gates);
CircuitDag circuit_from_json(const Json& doc);

// {"name", "num_qubits", "local_edges", "quantum_channels", "module_of"}
Json graph_to_json(const CouplingGraph& g);
CouplingGraph graph_from_json(const Json& doc);
// Built-in name or path to a graph JSON file.
CouplingGraph load_topology(const std::string& name_or_file);

// Missing keys keep the values already in `cfg`; unknown keys are errors.
// On error `cfg` is left untouched.
Json env_config_to_json(const EnvConfig& cfg);
void merge_env_config(const Json& doc, EnvConfig& cfg);
Json agent_config_to_json(const AgentConfig& cfg);
void merge_agent_config(const Json& doc, AgentConfig& cfg);

// Circuit set directory: manifest.json plus one file per circuit.
struct CircuitSetFiles {
  CircuitSetSpec spec;
  std::vector<std::string> files;
};
// Refuses to write into an existing non-empty directory unless `force`.
CircuitSetFiles write_circuit_set(const fs::path& dir, const CircuitSetSpec& spec, bool force);
std::vector<CircuitDag> load_circuit_set(const fs::path& dir);

// Versioned JSON checkpoint of the trained networks and everything needed
// to rebuild the environment and action layout.
struct Checkpoint {
  std::shared_ptr<const World> world;
  AgentConfig agent;
  int max_gates = 0;
  MlpParams main;
  MlpParams target;
};
inline constexpr int kCheckpointVersion = 1;
Json checkpoint_to_json(const World& world, const DdqnAgent& agent, int max_gates);
Checkpoint checkpoint_from_json(const Json& doc);
// Rebuilds an agent holding the checkpoint weights.
DdqnAgent restore_agent(const Checkpoint& cp);

// Deterministic CSV text.
std::string format_number(double v);
std::string train_log_csv(std::span<const EpisodeRecord> log);
std::string moving_average_csv(std::span<const MovingStat> rows);
std::string eval_csv(std::span<const EvalRow> rows);
std::string summary_csv(const Summary& time_summary);
std::string trace_csv(std::span<const TraceRow> rows);

}  // namespace dqcr
