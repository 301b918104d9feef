// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "dqcr/errors.hpp"
#include "dqcr/io.hpp"
#include "test_support.hpp"

namespace dqcr {
namespace {

const fs::path kScratch = fs::temp_directory_path() / "dqcr_io_cli_test";

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
  void TearDown() override { fs::remove_all(kScratch); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DQCR_CLI) + " " + args + " > " + (kScratch / "stdout.txt").string() +
                          " 2> " + (kScratch / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(Json, CircuitRoundTrip) {
  const GateList gates{{0, 1}, {2, 0}, {1, 2}};
  const auto doc = circuit_to_json(4, gates);
  const auto dag = circuit_from_json(doc);
  EXPECT_EQ(dag.num_virtual_qubits(), 4);
  EXPECT_EQ(dag.num_gates_total(), 3);
  const auto bare = circuit_from_json(Json::parse("[[0,1],[2,0]]"));
  EXPECT_EQ(bare.num_virtual_qubits(), 3);
  EXPECT_THROW(circuit_from_json(Json::parse(R"({"num_virtual_qubits":2,"gates":[[0,0]]})")), ValidationError);
  EXPECT_THROW(circuit_from_json(Json::parse(R"({"num_virtual_qubits":2,"gates":[],"x":1})")), ValidationError);
  EXPECT_THROW(circuit_from_json(Json::parse(R"({"num_virtual_qubits":2,"gates":[[0,"a"]]})")), ValidationError);
}

TEST(Json, GraphRoundTrip) {
  for (const auto& g : {CouplingGraph::guadalupe_pair(), CouplingGraph::grid_pair(), CouplingGraph::toy_pair()}) {
    const auto back = graph_from_json(graph_to_json(g));
    EXPECT_EQ(back.num_qubits(), g.num_qubits());
    EXPECT_EQ(back.local_edges(), g.local_edges());
    EXPECT_EQ(back.channels(), g.channels());
    EXPECT_EQ(graph_to_json(back), graph_to_json(g));
  }
  EXPECT_EQ(load_topology("toy2x2x2").num_qubits(), 8);
  EXPECT_THROW(load_topology("no-such-topology"), ValidationError);
}

TEST(Json, ConfigMergeKeepsDefaultsAndRejectsUnknownKeys) {
  EnvConfig env;
  merge_env_config(Json::parse(R"({"t_max": 99, "reward": {"xi": 2.5}})"), env);
  EXPECT_EQ(env.t_max, 99);
  EXPECT_DOUBLE_EQ(env.reward.xi, 2.5);
  EXPECT_DOUBLE_EQ(env.reward.r_score, 500.0);
  EXPECT_EQ(env.timing.t_remote, 5);
  EXPECT_THROW(merge_env_config(Json::parse(R"({"tmax": 1})"), env), ValidationError);
  EXPECT_THROW(merge_env_config(Json::parse(R"({"t_max": -5})"), env), ValidationError);
  EXPECT_EQ(env.t_max, 99);
  EnvConfig again;
  merge_env_config(env_config_to_json(env), again);
  EXPECT_EQ(env_config_to_json(again), env_config_to_json(env));

  AgentConfig agent;
  merge_agent_config(Json::parse(R"({"alpha": 0.1, "hidden1": 7})"), agent);
  EXPECT_DOUBLE_EQ(agent.alpha, 0.1);
  EXPECT_EQ(agent.hidden1, 7);
  EXPECT_EQ(agent.hidden2, 140);
  EXPECT_THROW(merge_agent_config(Json::parse(R"({"alpha": 0.7})"), agent), ValidationError);
  EXPECT_THROW(merge_agent_config(Json::parse(R"({"beta": 1})"), agent), ValidationError);
}

TEST(Json, CheckpointRoundTripAndLayoutCheck) {
  auto world = testing::make_world(CouplingGraph::toy_pair(), AgentMode::kRout, 17);
  AgentConfig cfg;
  cfg.hidden1 = 6;
  cfg.hidden2 = 5;
  cfg.batch_size = 4;
  cfg.buffer_size = 16;
  DdqnAgent agent(world->space(), state_size(8, 3), cfg, 5);
  agent.target().soft_update_from(agent.main(), 0.5);
  const auto doc = checkpoint_to_json(*world, agent, 3);
  const auto cp = checkpoint_from_json(Json::parse(doc.dump()));
  EXPECT_EQ(cp.max_gates, 3);
  EXPECT_EQ(cp.world->path_seed(), 17u);
  EXPECT_EQ(cp.world->mode(), AgentMode::kRout);
  const auto restored = restore_agent(cp);
  const std::vector<int> s{0, 1, -1, 2, -1, -1, -1, 3, 0, 1, 1, 2, 3, 1, 0, 0, 0};
  EXPECT_EQ(restored.heads(s), agent.heads(s));
  EXPECT_EQ(checkpoint_to_json(*cp.world, restored, 3).dump(), doc.dump());

  auto wrong = doc;
  wrong["layout"]["actions"] = 35;
  EXPECT_THROW(checkpoint_from_json(wrong), ValidationError);
  wrong = doc;
  wrong["graph"] = graph_to_json(testing::line_pair(3));
  EXPECT_THROW(checkpoint_from_json(wrong), ValidationError);
  wrong = doc;
  wrong["version"] = 2;
  EXPECT_THROW(checkpoint_from_json(wrong), ValidationError);
}

TEST(Csv, Formats) {
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1210), "1210");
  EpisodeRecord a;
  a.episode = 0;
  a.reward = -12.5;
  a.elapsed = 40;
  a.success = true;
  a.epsilon = 1;
  EpisodeRecord b = a;
  b.episode = 1;
  b.success = false;
  b.mean_loss = 0.25;
  const std::vector<EpisodeRecord> log{a, b};
  EXPECT_EQ(train_log_csv(log),
            "episode,reward,time_elapsed,success,epsilon,mean_loss\n0,-12.5,40,1,1,\n1,-12.5,40,0,1,0.25\n");
  const std::vector<MovingStat> ma{{0, 40, 0}};
  EXPECT_EQ(moving_average_csv(ma), "episode,mean,std\n0,40,0\n");
  const std::vector<EvalRow> ev{{0, 12, true}};
  EXPECT_EQ(eval_csv(ev), "circuit_id,time,success\n0,12,1\n");
  EXPECT_EQ(lines(summary_csv(summarize(std::vector<double>{1, 2, 3})))[0],
            "count,mean,std,min,q1,median,q3,max,success_rate");
  const std::vector<TraceRow> tr{{0, Action::rout(2, 5), -18, 3, 4}, {1, Action::stop(), -20, 3, 4}};
  EXPECT_EQ(trace_csv(tr), "t,action_kind,action_args,reward,gates_remaining,d_G\n0,ROUT,2>5,-18,3,4\n1,STOP,,-20,3,4\n");
}

TEST_F(Scratch, CircuitSetFiles) {
  const auto dir = kScratch / "set";
  const auto files = write_circuit_set(dir, CircuitSetSpec{3, 5, 4, 9}, false);
  EXPECT_EQ(files.files.size(), 3u);
  const auto back = load_circuit_set(dir);
  ASSERT_EQ(back.size(), 3u);
  const auto gates = generate_gates(CircuitSetSpec{3, 5, 4, 9}, 1);
  std::vector<std::pair<int, int>> loaded;
  for (const auto& g : back[1].remaining()) loaded.emplace_back(g.control, g.target);
  EXPECT_EQ(loaded, gates);
  EXPECT_THROW(write_circuit_set(dir, CircuitSetSpec{3, 5, 4, 9}, false), ValidationError);
  EXPECT_NO_THROW(write_circuit_set(dir, CircuitSetSpec{1, 5, 4, 9}, true));
  EXPECT_EQ(load_circuit_set(dir).size(), 1u);
}

TEST_F(Scratch, CliExitCodes) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("generate --count 2"), 1);
  EXPECT_EQ(run_cli("generate --gates 0 --out " + (kScratch / "g0").string()), 2);
  EXPECT_EQ(run_cli("train --set " + (kScratch / "missing").string() + " --out " + (kScratch / "t").string()), 2);
}

TEST_F(Scratch, GenerateEmptyAndRefuseOverwrite) {
  const auto dir = kScratch / "empty";
  ASSERT_EQ(run_cli("generate --gates 3 --count 0 --qubits 4 --seed 1 --out " + dir.string()), 0);
  const auto manifest = read_json(dir / "manifest.json");
  EXPECT_EQ(manifest["num_circuits"], 0);
  EXPECT_TRUE(manifest["circuits"].empty());
  const auto full = kScratch / "full";
  ASSERT_EQ(run_cli("generate --gates 3 --count 2 --qubits 4 --seed 1 --out " + full.string()), 0);
  EXPECT_EQ(run_cli("generate --gates 3 --count 2 --qubits 4 --seed 1 --out " + full.string()), 2);
  EXPECT_EQ(run_cli("generate --gates 3 --count 2 --qubits 4 --seed 1 --force --out " + full.string()), 0);
}

TEST_F(Scratch, TrainEvalEndToEnd) {
  const auto set = kScratch / "set";
  ASSERT_EQ(run_cli("generate --gates 3 --count 3 --qubits 5 --seed 4 --out " + set.string()), 0);
  write_json(kScratch / "cfg.json", Json::parse(R"({"env": {"t_max": 300}, "agent": {"hidden1": 12, "hidden2": 10,
             "batch_size": 16, "buffer_size": 64}})"));
  const std::string common = "train --topology toy2x2x2 --episodes 4 --seed 3 --set " + set.string() +
                             " --config " + (kScratch / "cfg.json").string() + " --t-max 200";
  ASSERT_EQ(run_cli(common + " --out " + (kScratch / "a").string()), 0) << read_text(kScratch / "stderr.txt");
  ASSERT_EQ(run_cli(common + " --out " + (kScratch / "b").string()), 0);
  for (const char* f : {"train.csv", "moving_time.csv", "moving_reward.csv", "checkpoint.json"})
    EXPECT_EQ(read_text(kScratch / "a" / f), read_text(kScratch / "b" / f)) << f;
  EXPECT_TRUE(fs::exists(kScratch / "a" / "wall_time.txt"));

  // flag beats config file beats defaults
  const auto cp = checkpoint_from_json(read_json(kScratch / "a" / "checkpoint.json"));
  EXPECT_EQ(cp.world->config().t_max, 200);
  EXPECT_EQ(cp.agent.hidden1, 12);
  EXPECT_EQ(cp.agent.learn_every, 5);
  EXPECT_EQ(cp.world->mode(), AgentMode::kRout);

  const auto train = lines(read_text(kScratch / "a" / "train.csv"));
  ASSERT_EQ(train.size(), 5u);
  EXPECT_EQ(train[0], "episode,reward,time_elapsed,success,epsilon,mean_loss");

  const std::string eval = "eval --checkpoint " + (kScratch / "a" / "checkpoint.json").string() + " --set " +
                           set.string() + " --seed 2";
  ASSERT_EQ(run_cli(eval + " --out " + (kScratch / "e1").string() + " --trace-dir " + (kScratch / "tr").string()), 0);
  ASSERT_EQ(run_cli(eval + " --threads 3 --out " + (kScratch / "e2").string()), 0);
  EXPECT_EQ(read_text(kScratch / "e1" / "eval.csv"), read_text(kScratch / "e2" / "eval.csv"));
  EXPECT_EQ(read_text(kScratch / "e1" / "summary.csv"), read_text(kScratch / "e2" / "summary.csv"));
  EXPECT_EQ(lines(read_text(kScratch / "e1" / "eval.csv")).size(), 4u);
  EXPECT_TRUE(fs::exists(kScratch / "tr" / "trace_0002.csv"));
  EXPECT_EQ(run_cli(eval + " --topology guadalupe2 --out " + (kScratch / "e3").string()), 2);
}

TEST_F(Scratch, EvalOnEmptyCircuits) {
  const auto set = kScratch / "set";
  fs::create_directories(set);
  write_json(set / "manifest.json",
             Json::parse(R"({"version":1,"num_circuits":2,"num_virtual_qubits":3,"num_gates":1,
                "seed":0,"circuits":[{"id":0,"file":"a.json","seed":0},{"id":1,"file":"b.json","seed":0}]})"));
  write_json(set / "a.json", circuit_to_json(3, GateList{}));
  write_json(set / "b.json", circuit_to_json(3, GateList{}));
  ASSERT_EQ(run_cli("generate --gates 2 --count 1 --qubits 3 --seed 1 --out " + (kScratch / "g").string()), 0);
  ASSERT_EQ(run_cli("train --topology toy2x2x2 --episodes 1 --hidden1 4 --hidden2 4 --batch-size 8 --buffer-size 8 "
                    "--set " + (kScratch / "g").string() + " --out " + (kScratch / "t").string()),
            0);
  ASSERT_EQ(run_cli("eval --checkpoint " + (kScratch / "t" / "checkpoint.json").string() + " --set " + set.string() +
                    " --out " + (kScratch / "e").string()),
            0)
      << read_text(kScratch / "stderr.txt");
  EXPECT_EQ(read_text(kScratch / "e" / "eval.csv"), "circuit_id,time,success\n0,0,1\n1,0,1\n");
}

TEST_F(Scratch, OracleCommand) {
  write_json(kScratch / "c.json", circuit_to_json(2, GateList{{0, 1}}));
  ASSERT_EQ(run_cli("oracle --topology toy2x2x2 --circuit " + (kScratch / "c.json").string() +
                    " --mapping 0,-1,-1,-1,1,-1,-1,-1 --agent rout --cache " + (kScratch / "cache.json").string()),
            0);
  const auto out = Json::parse(read_text(kScratch / "stdout.txt"));
  EXPECT_EQ(out["status"], "optimal");
  EXPECT_EQ(out["time"], 13);
  EXPECT_TRUE(fs::exists(kScratch / "cache.json"));
  EXPECT_EQ(run_cli("oracle --circuit " + (kScratch / "c.json").string() + " --mapping 0,0,-1"), 2);
}

}  // namespace
}  // namespace dqcr
