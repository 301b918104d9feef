// SPDX-License-Identifier: Apache-2.0
// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>

#include "dqcr/agent.hpp"
#include "dqcr/circuit_gen.hpp"
#include "dqcr/io.hpp"
#include "dqcr/mlp.hpp"
#include "dqcr/oracle.hpp"
#include "dqcr/training.hpp"
#include "mask_audit.hpp"
#include "test_support.hpp"

namespace dqcr {
namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// 1. State encoding of the five-gate example layout.
Verdict encoding() {
  const auto g = CouplingGraph::toy_pair();
  const auto s = testing::make_state(g, CircuitDag::build(5, GateList{{3, 0}, {2, 4}, {0, 1}}),
                                     {3, -1, 0, 4, -1, 1, 2, -1});
  const std::vector<int> expected{3, -1, 0, 4, -1, 1, 2, -1, 0, 1, 2, 2, 4, 1, 3, 0, 1};
  const auto got = encode_state(s, 3);
  std::ostringstream os;
  for (int v : got) os << v << ' ';
  return {got == expected, "encoded [" + os.str() + "]"};
}

// 2. Alphabet sizes from the closed forms.
Verdict cardinalities() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& g : {CouplingGraph::guadalupe_pair(), CouplingGraph::grid_pair()}) {
    const int v = g.num_qubits(), en = static_cast<int>(g.local_edges().size()),
              ec = static_cast<int>(g.channels().size());
    const ActionSpace base(g, AgentMode::kBaseline), rout(g, AgentMode::kRout);
    const int want_base = g.name() == "guadalupe2" ? 35 : 51;
    ok &= base.size() == 1 + 2 * ec + en && base.size() == want_base;
    ok &= rout.size() == 1 + ec + v * (v - 1) && rout.size() == 994;
    ok &= rout.num_heads() == 1 + ec + v && rout.num_heads() == 34;
    os << g.name() << ": baseline " << base.size() << ", rout " << rout.size() << ", heads " << rout.num_heads()
       << "; ";
  }
  return {ok, os.str()};
}

// A briefly trained agent for a tiny topology.
DdqnAgent tiny_agent(std::shared_ptr<const World> world, std::uint64_t seed) {
  AgentConfig cfg;
  cfg.hidden1 = 32;
  cfg.hidden2 = 32;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 32;
  cfg.buffer_size = 5000;
  DdqnAgent agent(world->space(), state_size(world->graph().num_qubits(), 3), cfg, seed);
  Environment env(world);
  Rng rng(seed);
  const int n = std::min(3, world->graph().num_qubits() / 2);
  for (int k = 0; k < 40; ++k) {
    const auto dag = testing::random_dag(rng, 2 + static_cast<int>(rng.uniform(n - 1)), 1 + static_cast<int>(rng.uniform(3)));
    run_episode(env, agent, dag, rng.next_u64(), epsilon(k, 1.0, 10.0), true, 3);
  }
  return agent;
}

int greedy_time(std::shared_ptr<const World> world, DdqnAgent& agent, const CircuitDag& dag,
                const std::vector<int>& mapping) {
  Environment env(world);
  env.reset_with_mapping(dag, mapping);
  while (!env.done()) env.step_index(agent.act(encode_state(env.state(), 3), env.mask(), 0.0));
  return env.elapsed();
}

// 3. Oracle lower-bounds every policy; hand-checked instances match exactly.
Verdict oracle_equivalence() {
  bool ok = true;
  std::ostringstream os;
  {
    const auto adj = optimal_time(testing::make_world(testing::line_pair4(), AgentMode::kBaseline),
                                  CircuitDag::build(2, GateList{{0, 1}}), std::vector<int>{0, 1, -1, -1});
    const auto cross = optimal_time(testing::make_world(testing::line_pair4(), AgentMode::kBaseline),
                                    CircuitDag::build(2, GateList{{0, 1}}), std::vector<int>{0, -1, -1, 1});
    ok &= adj.status == OracleStatus::kOptimal && adj.time == 1;
    ok &= cross.status == OracleStatus::kOptimal && cross.time == 10;
    os << "adjacent T=" << adj.time << ", cross-module T=" << cross.time << "; ";
  }
  struct Topo {
    CouplingGraph g;
    int max_virtual;
  };
  const std::vector<Topo> topos{{testing::line_pair4(), 2}, {testing::line_pair(3), 3}, {CouplingGraph::toy_pair(), 3}};
  Rng rng(2024);
  int solved = 0, tried = 0, policy_runs = 0, violations = 0;
  for (std::size_t t = 0; t < topos.size(); ++t) {
    for (auto mode : {AgentMode::kBaseline, AgentMode::kRout}) {
      const auto world = testing::make_world(topos[t].g, mode, 5 + t);
      auto agent = tiny_agent(world, 77 + t);
      for (int k = 0; k < 10; ++k) {
        const int nq = world->graph().num_qubits();
        const int nv = 2 + static_cast<int>(rng.uniform(topos[t].max_virtual - 1));
        const auto dag = testing::random_dag(rng, nv, 1 + static_cast<int>(rng.uniform(3)));
        std::vector<int> mapping(nq, kEmpty);
        std::vector<int> slots(nq);
        for (int q = 0; q < nq; ++q) slots[q] = q;
        for (int v = 0; v < nv; ++v) {
          const auto pick = v + rng.uniform(nq - v);
          std::swap(slots[v], slots[pick]);
          mapping[slots[v]] = v;
        }
        OracleLimits lim;
        lim.max_states = 400'000;
        ++tried;
        const auto best = optimal_time(world, dag, mapping, lim);
        if (best.status != OracleStatus::kOptimal) continue;
        ++solved;
        std::vector<std::uint64_t> seeds(20);
        for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = rng.next_u64();
        const auto random = random_policy_baseline(world, dag, seeds, mapping);
        for (int time : random.times) violations += time < best.time;
        violations += greedy_time(world, agent, dag, mapping) < best.time;
        policy_runs += static_cast<int>(random.times.size()) + 1;
      }
    }
  }
  ok &= solved >= 50 && violations == 0;
  os << solved << "/" << tried << " instances solved, " << policy_runs << " policy runs, " << violations
     << " below the optimum";
  return {ok, os.str()};
}

// 4. Episode reward equals its decomposition, recomputed from outside.
Verdict reward_accounting() {
  long mismatches = 0, move_checked = 0;
  double worst = 0;
  for (auto mode : {AgentMode::kBaseline, AgentMode::kRout}) {
    const auto world = testing::make_world(CouplingGraph::toy_pair(), mode, 3);
    const auto& rc = world->config().reward;
    Rng rng(mode == AgentMode::kRout ? 11 : 12);
    for (int ep = 0; ep < 500; ++ep) {
      Environment env(world);
      const auto dag = testing::random_dag(rng, 4, 5);
      double total = env.reset(dag, rng.next_u64()).reward.total();
      double moves = 0, stops = 0;
      while (!env.done()) {
        const auto mask = env.mask();
        std::vector<int> adm;
        for (int a = 0; a < static_cast<int>(mask.size()); ++a)
          if (mask[a]) adm.push_back(a);
        const int a = adm[rng.uniform(adm.size())];
        const double d_before = env.distance();
        const int now_before = env.state().now;
        const auto r = env.step_index(a);
        total += r.reward.total();
        if (a == 0) {
          const int advanced = env.state().now - now_before;
          stops += mode == AgentMode::kRout ? rc.r_stop * advanced : rc.r_stop;
        } else {
          moves += r.reward.move;
          if (r.deleted == 0) {
            double expect = rc.xi * (d_before - env.distance());
            if (mode == AgentMode::kRout) expect = std::max(expect, 0.0);
            ++move_checked;
            if (std::abs(expect - r.reward.move) > 1e-9) ++mismatches;
          }
        }
      }
      const int deletes = dag.num_gates_total() - env.state().dag.num_remaining();
      const double terminal = env.outcome() == Outcome::kSuccess ? rc.r_success : rc.r_fail;
      const double decomposed = rc.r_score * deletes + terminal + moves + stops;
      worst = std::max(worst, std::abs(decomposed - total));
      if (decomposed != total) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("1000 episodes, %.0f mismatches, max |diff| %.3g, %.0f move rewards recomputed",
                               static_cast<double>(mismatches), worst, static_cast<double>(move_checked))};
}

std::vector<double> flatten(MlpParams p) {
  std::vector<double> out;
  p.for_each([&](double& x) { out.push_back(x); });
  return out;
}

// 5. Backprop against central differences through the induced-Q head.
Verdict gradients() {
  const ActionSpace space(CouplingGraph::toy_pair(), AgentMode::kRout);
  Rng rng(5);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = 0.05 + 0.4 * rng.uniform01();
    const QLayout layout(space, alpha);
    const MlpShape shape{6, 7, 5, space.num_heads()};
    const Mlp net(shape, rng);
    Eigen::MatrixXd x(6, 1);
    for (int i = 0; i < 6; ++i) x(i) = 2.0 * rng.uniform01() - 1.0;
    const int action = trial % 4 == 0 ? static_cast<int>(rng.uniform(space.size()))
                                      : space.rout_index(static_cast<int>(rng.uniform(4)), 4 + static_cast<int>(rng.uniform(4)));
    const double y = 2.0 * rng.uniform01() - 1.0;
    auto loss = [&](const Mlp& m) {
      const double d = layout.value(m.forward(x).col(0), action) - y;
      return d * d;
    };
    MlpCache cache;
    const auto q = net.forward(x, &cache);
    Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(q.rows(), 1);
    layout.accumulate_grad(d_out.col(0), action, 2.0 * (layout.value(q.col(0), action) - y));
    const auto analytic = flatten(net.backward(cache, d_out));
    const auto base = net.params();
    const double h = 1e-6;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
      auto plus = base, minus = base;
      std::size_t i = 0;
      plus.for_each([&](double& v) { v += (i++ == k) ? h : 0.0; });
      i = 0;
      minus.for_each([&](double& v) { v -= (i++ == k) ? h : 0.0; });
      const double numeric = (loss(Mlp(plus)) - loss(Mlp(minus))) / (2 * h);
      const double scale = std::max(std::abs(numeric), std::abs(analytic[k]));
      if (scale > 1e-8) worst = std::max(worst, std::abs(numeric - analytic[k]) / scale);
    }
  }
  return {worst < 1e-4, fmt("20 triples, max relative error %.2e", worst)};
}

// 6. Learning signal on the toy system.
Verdict learning_signal() {
  bool ok = true;
  std::ostringstream os;
  const auto g = CouplingGraph::toy_pair();
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto world = std::make_shared<const World>(g, EnvConfig{}, AgentMode::kRout, derive_seed(seed, 1));
    const auto circuits = generate_set(CircuitSetSpec{300, 4, 5, seed});
    AgentConfig cfg;
    cfg.hidden1 = 64;
    cfg.hidden2 = 64;
    cfg.learning_rate = 1e-3;
    cfg.batch_size = 64;
    cfg.buffer_size = 20000;
    DdqnAgent agent(world->space(), state_size(g.num_qubits(), 5), cfg, derive_seed(seed, 2));
    TrainOptions opt;
    opt.episodes = 300;
    opt.seed = derive_seed(seed, 3);
    opt.max_gates = 5;
    const auto log = train_agent(world, agent, circuits, opt, nullptr);
    std::vector<double> times;
    for (const auto& r : log) times.push_back(r.elapsed);
    const auto ma = moving_average(times, 10);
    double final_ma = 0;
    for (std::size_t k = ma.size() - 50; k < ma.size(); ++k) final_ma += ma[k].mean / 50.0;

    Environment env(world);
    Rng rng(derive_seed(seed, 4));
    double random_mean = 0;
    for (std::size_t c = 0; c < circuits.size(); ++c)
      random_mean += run_random_episode(env, circuits[c], derive_seed(seed, 100 + c), rng).elapsed;
    random_mean /= static_cast<double>(circuits.size());
    const double reduction = 1.0 - final_ma / random_mean;
    ok &= reduction >= 0.20;
    os << fmt("seed %.0f: final MA %.1f vs random %.1f (%.0f%% lower); ", static_cast<double>(seed), final_ma,
              random_mean, 100 * reduction);
  }
  return {ok, os.str()};
}

// 7. Mask soundness on sampled states of both 32-qubit systems.
Verdict masking() {
  bool ok = true;
  std::ostringstream os;
  Rng rng(99);
  for (const auto& g : {CouplingGraph::guadalupe_pair(), CouplingGraph::grid_pair()}) {
    for (auto mode : {AgentMode::kRout, AgentMode::kBaseline}) {
      const auto world = testing::make_world(g, mode, 7);
      testing::MaskAudit audit;
      for (const auto& env : testing::sample_states(world, 10000, 18, 30, rng)) testing::audit_state(env, audit);
      ok &= audit.failures.empty() && audit.states == 10000;
      os << g.name() << "/" << to_string(mode) << ": " << audit.states << " states, " << audit.admitted
         << " admitted";
      if (mode == AgentMode::kRout)
        os << " (ROUT classes " << audit.per_class[0] << "/" << audit.per_class[1] << "/" << audit.per_class[2] << ")";
      if (!audit.failures.empty()) os << " first failure: " << audit.failures.front();
      os << "; ";
    }
  }
  return {ok, os.str()};
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 8. Two identical five-episode runs give identical bytes.
Verdict determinism() {
  const auto dir = fs::temp_directory_path() / "dqcr_acceptance_determinism";
  fs::remove_all(dir);
  const std::string cli = DQCR_CLI;
  const std::string quiet = " > /dev/null 2>&1";
  if (run(cli + " generate --gates 6 --count 5 --qubits 4 --seed 8 --out " + (dir / "set").string() + quiet) != 0)
    return {false, "generate failed"};
  const std::string train = cli + " train --topology toy2x2x2 --episodes 5 --seed 42 --batch-size 32 --hidden1 32 "
                                  "--hidden2 32 --set " + (dir / "set").string();
  if (run(train + " --out " + (dir / "a").string() + quiet) != 0 ||
      run(train + " --out " + (dir / "b").string() + quiet) != 0)
    return {false, "train failed"};
  bool ok = true;
  std::ostringstream os;
  for (const char* f : {"train.csv", "moving_time.csv", "moving_reward.csv", "checkpoint.json"}) {
    const bool same = read_text(dir / "a" / f) == read_text(dir / "b" / f);
    ok &= same;
    os << f << (same ? " identical; " : " DIFFERS; ");
  }
  fs::remove_all(dir);
  return {ok, os.str()};
}

}  // namespace
}  // namespace dqcr

int main() {
  using namespace dqcr;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"state encoding", encoding},           {"action cardinalities", cardinalities},
      {"oracle equivalence", oracle_equivalence}, {"reward accounting", reward_accounting},
      {"gradient check", gradients},          {"learning signal", learning_signal},
      {"masking soundness", masking},         {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::printf("criterion %zu (%s): %s [%.1fs] %s\n", k + 1, criteria[k].first.c_str(), v.pass ? "PASS" : "FAIL",
                secs, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
