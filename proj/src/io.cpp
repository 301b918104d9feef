// SPDX-License-Identifier: Apache-2.0
#include "dqcr/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dqcr/errors.hpp"

namespace dqcr {

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

Json read_json(const fs::path& file) {
  auto doc = Json::parse(read_text(file), nullptr, false);
  if (doc.is_discarded()) throw ValidationError("malformed JSON in " + file.string());
  return doc;
}

void write_json(const fs::path& file, const Json& doc) { write_text(file, doc.dump(2) + "\n"); }

namespace {

template <typename T>
T get_as(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("missing key '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("bad value for '") + key + "'");
  }
}

std::vector<Edge> edges_from_json(const Json& arr, const char* key) {
  if (!arr.is_array()) throw ValidationError(std::string("'") + key + "' must be an array of pairs");
  std::vector<Edge> out;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ValidationError(std::string("'") + key + "' must be an array of integer pairs");
    out.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return out;
}

Json edges_to_json(const std::vector<Edge>& edges) {
  Json arr = Json::array();
  for (const auto& e : edges) arr.push_back({e.a, e.b});
  return arr;
}

void check_keys(const Json& doc, std::initializer_list<const char*> allowed, const char* where) {
  if (!doc.is_object()) throw ValidationError(std::string(where) + " must be an object");
  for (const auto& [k, v] : doc.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ValidationError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void merge(const Json& doc, const char* key, T& field) {
  if (doc.contains(key)) field = get_as<T>(doc, key);
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const Json& doc) {
  const auto rows = get_as<Eigen::Index>(doc, "rows");
  const auto cols = get_as<Eigen::Index>(doc, "cols");
  const auto& data = doc.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw ValidationError("checkpoint matrix has inconsistent size");
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  return m;
}

Json params_to_json(const MlpParams& p) {
  return {{"w1", matrix_to_json(p.w1)}, {"b1", matrix_to_json(p.b1)}, {"w2", matrix_to_json(p.w2)},
          {"b2", matrix_to_json(p.b2)}, {"w3", matrix_to_json(p.w3)}, {"b3", matrix_to_json(p.b3)}};
}

MlpParams params_from_json(const Json& doc) {
  MlpParams p;
  p.w1 = matrix_from_json(doc.at("w1"));
  p.w2 = matrix_from_json(doc.at("w2"));
  p.w3 = matrix_from_json(doc.at("w3"));
  p.b1 = matrix_from_json(doc.at("b1"));
  p.b2 = matrix_from_json(doc.at("b2"));
  p.b3 = matrix_from_json(doc.at("b3"));
  return p;
}

}  // namespace

Json circuit_to_json(int num_virtual_qubits, std::span<const std::pair<int, int>> gates) {
  Json arr = Json::array();
  for (const auto& [c, t] : gates) arr.push_back({c, t});
  return {{"num_virtual_qubits", num_virtual_qubits}, {"gates", std::move(arr)}};
}

CircuitDag circuit_from_json(const Json& doc) {
  const Json* arr = &doc;
  int n = -1;
  if (doc.is_object()) {
    check_keys(doc, {"num_virtual_qubits", "gates"}, "circuit");
    n = get_as<int>(doc, "num_virtual_qubits");
    if (!doc.contains("gates")) throw ValidationError("missing key 'gates'");
    arr = &doc.at("gates");
  }
  if (!arr->is_array()) throw ValidationError("'gates' must be an array of pairs");
  GateList gates;
  for (const auto& g : *arr) {
    if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() || !g[1].is_number_integer())
      throw ValidationError("'gates' must be an array of integer pairs");
    gates.emplace_back(g[0].get<int>(), g[1].get<int>());
  }
  if (n < 0) {
    n = 0;
    for (const auto& [c, t] : gates) n = std::max({n, c + 1, t + 1});
  }
  return CircuitDag::build(n, gates);
}

Json graph_to_json(const CouplingGraph& g) {
  return {{"name", g.name()},
          {"num_qubits", g.num_qubits()},
          {"local_edges", edges_to_json(g.local_edges())},
          {"quantum_channels", edges_to_json(g.channels())},
          {"module_of", g.modules()}};
}

CouplingGraph graph_from_json(const Json& doc) {
  check_keys(doc, {"name", "num_qubits", "local_edges", "quantum_channels", "module_of"}, "graph");
  const std::string name = doc.contains("name") ? get_as<std::string>(doc, "name") : "custom";
  if (!doc.contains("local_edges") || !doc.contains("quantum_channels"))
    throw ValidationError("graph needs 'local_edges' and 'quantum_channels'");
  return CouplingGraph(get_as<int>(doc, "num_qubits"), edges_from_json(doc.at("local_edges"), "local_edges"),
                       edges_from_json(doc.at("quantum_channels"), "quantum_channels"),
                       get_as<std::vector<int>>(doc, "module_of"), name);
}

CouplingGraph load_topology(const std::string& name_or_file) {
  if (name_or_file == "guadalupe2" || name_or_file == "grid4x4x2" || name_or_file == "toy2x2x2")
    return CouplingGraph::by_name(name_or_file);
  if (!fs::exists(name_or_file)) throw ValidationError("unknown topology '" + name_or_file + "'");
  return graph_from_json(read_json(name_or_file));
}

Json env_config_to_json(const EnvConfig& cfg) {
  const auto& r = cfg.reward;
  const auto& t = cfg.timing;
  return {{"t_max", cfg.t_max},
          {"p_gen", cfg.p_gen},
          {"reward",
           {{"r_score", r.r_score},
            {"r_success", r.r_success},
            {"r_fail", r.r_fail},
            {"r_stop", r.r_stop},
            {"xi", r.xi},
            {"w", r.w}}},
          {"timing", {{"t_local", t.t_local}, {"t_swap", t.t_swap}, {"t_gen", t.t_gen}, {"t_remote", t.t_remote}}}};
}

void merge_env_config(const Json& doc, EnvConfig& out) {
  EnvConfig cfg = out;
  check_keys(doc, {"t_max", "p_gen", "reward", "timing"}, "env config");
  merge(doc, "t_max", cfg.t_max);
  merge(doc, "p_gen", cfg.p_gen);
  if (doc.contains("reward")) {
    const auto& r = doc.at("reward");
    check_keys(r, {"r_score", "r_success", "r_fail", "r_stop", "xi", "w"}, "reward config");
    merge(r, "r_score", cfg.reward.r_score);
    merge(r, "r_success", cfg.reward.r_success);
    merge(r, "r_fail", cfg.reward.r_fail);
    merge(r, "r_stop", cfg.reward.r_stop);
    merge(r, "xi", cfg.reward.xi);
    merge(r, "w", cfg.reward.w);
  }
  if (doc.contains("timing")) {
    const auto& t = doc.at("timing");
    check_keys(t, {"t_local", "t_swap", "t_gen", "t_remote"}, "timing config");
    merge(t, "t_local", cfg.timing.t_local);
    merge(t, "t_swap", cfg.timing.t_swap);
    merge(t, "t_gen", cfg.timing.t_gen);
    merge(t, "t_remote", cfg.timing.t_remote);
  }
  cfg.validate();
  out = cfg;
}

Json agent_config_to_json(const AgentConfig& c) {
  return {{"hidden1", c.hidden1},
          {"hidden2", c.hidden2},
          {"learning_rate", c.learning_rate},
          {"gamma", c.gamma},
          {"tau", c.tau},
          {"epsilon0", c.epsilon0},
          {"epsilon_decay", c.epsilon_decay},
          {"batch_size", c.batch_size},
          {"buffer_size", c.buffer_size},
          {"learn_every", c.learn_every},
          {"learn_iterations", c.learn_iterations},
          {"alpha", c.alpha},
          {"scale_inputs", c.scale_inputs}};
}

void merge_agent_config(const Json& doc, AgentConfig& out) {
  AgentConfig c = out;
  check_keys(doc,
             {"hidden1", "hidden2", "learning_rate", "gamma", "tau", "epsilon0", "epsilon_decay", "batch_size",
              "buffer_size", "learn_every", "learn_iterations", "alpha", "scale_inputs"},
             "agent config");
  merge(doc, "hidden1", c.hidden1);
  merge(doc, "hidden2", c.hidden2);
  merge(doc, "learning_rate", c.learning_rate);
  merge(doc, "gamma", c.gamma);
  merge(doc, "tau", c.tau);
  merge(doc, "epsilon0", c.epsilon0);
  merge(doc, "epsilon_decay", c.epsilon_decay);
  merge(doc, "batch_size", c.batch_size);
  merge(doc, "buffer_size", c.buffer_size);
  merge(doc, "learn_every", c.learn_every);
  merge(doc, "learn_iterations", c.learn_iterations);
  merge(doc, "alpha", c.alpha);
  merge(doc, "scale_inputs", c.scale_inputs);
  c.validate();
  out = c;
}

CircuitSetFiles write_circuit_set(const fs::path& dir, const CircuitSetSpec& spec, bool force) {
  spec.validate();
  if (fs::exists(dir) && !fs::is_directory(dir)) throw ValidationError(dir.string() + " is not a directory");
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!force) throw ValidationError(dir.string() + " already exists; pass --force to overwrite");
    fs::remove_all(dir);
  }
  fs::create_directories(dir);
  CircuitSetFiles out{spec, {}};
  Json entries = Json::array();
  for (int i = 0; i < spec.num_circuits; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "circuit_%04d.json", i);
    write_json(dir / name, circuit_to_json(spec.num_virtual_qubits, generate_gates(spec, i)));
    entries.push_back({{"id", i}, {"file", name}, {"seed", circuit_seed(spec, i)}});
    out.files.emplace_back(name);
  }
  write_json(dir / "manifest.json", {{"version", 1},
                                     {"num_circuits", spec.num_circuits},
                                     {"num_virtual_qubits", spec.num_virtual_qubits},
                                     {"num_gates", spec.num_gates},
                                     {"seed", spec.seed},
                                     {"circuits", std::move(entries)}});
  return out;
}

std::vector<CircuitDag> load_circuit_set(const fs::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw ValidationError("no manifest.json in " + dir.string());
  const auto manifest = read_json(manifest_path);
  std::vector<CircuitDag> out;
  if (!manifest.contains("circuits") || !manifest.at("circuits").is_array())
    throw ValidationError("manifest lacks a 'circuits' array");
  for (const auto& entry : manifest.at("circuits"))
    out.push_back(circuit_from_json(read_json(dir / get_as<std::string>(entry, "file"))));
  return out;
}

Json checkpoint_to_json(const World& world, const DdqnAgent& agent, int max_gates) {
  const auto& shape = agent.main().shape();
  return {{"version", kCheckpointVersion},
          {"mode", std::string(to_string(world.mode()))},
          {"graph", graph_to_json(world.graph())},
          {"env", env_config_to_json(world.config())},
          {"path_seed", world.path_seed()},
          {"max_gates", max_gates},
          {"layout",
           {{"input", shape.input},
            {"hidden1", shape.hidden1},
            {"hidden2", shape.hidden2},
            {"heads", shape.output},
            {"actions", world.space().size()},
            {"alpha", agent.config().alpha},
            {"scale_inputs", agent.config().scale_inputs}}},
          {"agent", agent_config_to_json(agent.config())},
          {"main", params_to_json(agent.main().params())},
          {"target", params_to_json(agent.target().params())}};
}

Checkpoint checkpoint_from_json(const Json& doc) {
  if (!doc.is_object() || get_as<int>(doc, "version") != kCheckpointVersion)
    throw ValidationError("unsupported checkpoint version");
  EnvConfig env;
  merge_env_config(doc.at("env"), env);
  Checkpoint cp;
  cp.world = std::make_shared<const World>(graph_from_json(doc.at("graph")), env,
                                           parse_agent_mode(get_as<std::string>(doc, "mode")),
                                           get_as<std::uint64_t>(doc, "path_seed"));
  merge_agent_config(doc.at("agent"), cp.agent);
  cp.max_gates = get_as<int>(doc, "max_gates");
  cp.main = params_from_json(doc.at("main"));
  cp.target = params_from_json(doc.at("target"));
  const auto& layout = doc.at("layout");
  const auto shape = cp.main.shape();
  if (shape.input != state_size(cp.world->graph().num_qubits(), cp.max_gates) ||
      shape.output != cp.world->space().num_heads() || get_as<int>(layout, "heads") != shape.output ||
      get_as<int>(layout, "actions") != cp.world->space().size() || shape.hidden1 != cp.agent.hidden1 ||
      shape.hidden2 != cp.agent.hidden2 || cp.target.shape().input != shape.input ||
      cp.target.shape().output != shape.output)
    throw ValidationError("checkpoint layout does not match its topology and alphabet");
  return cp;
}

DdqnAgent restore_agent(const Checkpoint& cp) {
  DdqnAgent agent(cp.world->space(), cp.main.shape().input, cp.agent, 0);
  agent.main().params() = cp.main;
  agent.target().params() = cp.target;
  return agent;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string train_log_csv(std::span<const EpisodeRecord> log) {
  std::string out = "episode,reward,time_elapsed,success,epsilon,mean_loss\n";
  for (const auto& r : log) {
    out += std::to_string(r.episode) + ',' + format_number(r.reward) + ',' + std::to_string(r.elapsed) + ',' +
           (r.success ? "1" : "0") + ',' + format_number(r.epsilon) + ',' +
           (r.mean_loss ? format_number(*r.mean_loss) : std::string()) + '\n';
  }
  return out;
}

std::string moving_average_csv(std::span<const MovingStat> rows) {
  std::string out = "episode,mean,std\n";
  for (const auto& r : rows)
    out += std::to_string(r.episode) + ',' + format_number(r.mean) + ',' + format_number(r.std) + '\n';
  return out;
}

std::string eval_csv(std::span<const EvalRow> rows) {
  std::string out = "circuit_id,time,success\n";
  for (const auto& r : rows)
    out += std::to_string(r.circuit_id) + ',' + std::to_string(r.time) + ',' + (r.success ? "1" : "0") + '\n';
  return out;
}

std::string summary_csv(const Summary& s) {
  std::string out = "count,mean,std,min,q1,median,q3,max,success_rate\n";
  out += std::to_string(s.count) + ',' + format_number(s.mean) + ',' + format_number(s.std) + ',' +
         format_number(s.min) + ',' + format_number(s.q1) + ',' + format_number(s.median) + ',' +
         format_number(s.q3) + ',' + format_number(s.max) + ',' + format_number(s.success_rate) + '\n';
  return out;
}

std::string trace_csv(std::span<const TraceRow> rows) {
  std::string out = "t,action_kind,action_args,reward,gates_remaining,d_G\n";
  for (const auto& r : rows) {
    const std::string text = to_string(r.action);
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    out += std::to_string(r.t) + ',' + kind + ',' + args + ',' + format_number(r.reward) + ',' +
           std::to_string(r.gates_remaining) + ',' + format_number(r.distance) + '\n';
  }
  return out;
}

}  // namespace dqcr
