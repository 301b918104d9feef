// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "dqcr/circuit_dag.hpp"
#include "dqcr/errors.hpp"
#include "test_support.hpp"

namespace dqcr {
namespace {

std::vector<int> ids(const std::vector<Gate>& gates) {
  std::vector<int> out;
  for (const auto& g : gates) out.push_back(g.id);
  return out;
}

// Longest-path depth by memoized recursion over the original gate list,
// restricted to the gates still present.
std::vector<int> layer_oracle(const GateList& list, const std::vector<bool>& removed) {
  const int n = static_cast<int>(list.size());
  std::vector<int> memo(n, 0);
  std::function<int(int)> depth = [&](int v) {
    if (memo[v]) return memo[v];
    int best = 0;
    for (int u = 0; u < v; ++u) {
      if (removed[u]) continue;
      const auto [a, b] = list[u];
      const auto [c, d] = list[v];
      if (a == c || a == d || b == c || b == d) best = std::max(best, depth(u));
    }
    return memo[v] = best + 1;
  };
  std::vector<int> out(n, 0);
  for (int v = 0; v < n; ++v)
    if (!removed[v]) out[v] = depth(v);
  return out;
}

TEST(CircuitDag, FigureFiveGatesLayersAndEdges) {
  const GateList list{{3, 0}, {2, 4}, {0, 1}};
  const auto dag = CircuitDag::build(5, list);
  ASSERT_EQ(dag.num_gates_total(), 3);
  EXPECT_EQ(dag.gate(0).layer, 1);
  EXPECT_EQ(dag.gate(1).layer, 1);
  EXPECT_EQ(dag.gate(2).layer, 2);
  EXPECT_EQ(dag.edges(), (std::vector<std::pair<int, int>>{{0, 2}}));
  EXPECT_EQ(ids(dag.frontier()), (std::vector<int>{0, 1}));
}

TEST(CircuitDag, InputOrderOfFigureFiveList) {
  const GateList list{{3, 0}, {0, 1}, {2, 4}};
  const auto dag = CircuitDag::build(5, list);
  EXPECT_EQ(dag.gate(0).layer, 1);
  EXPECT_EQ(dag.gate(1).layer, 2);
  EXPECT_EQ(dag.gate(2).layer, 1);
  EXPECT_EQ(dag.edges(), (std::vector<std::pair<int, int>>{{0, 1}}));
}

TEST(CircuitDag, EmptyCircuit) {
  const auto dag = CircuitDag::build(3, GateList{});
  EXPECT_TRUE(dag.empty());
  EXPECT_TRUE(dag.frontier().empty());
  EXPECT_TRUE(dag.edges().empty());
}

TEST(CircuitDag, RepeatedGateIsSequential) {
  const auto dag = CircuitDag::build(2, GateList{{0, 1}, {0, 1}});
  EXPECT_EQ(dag.gate(1).layer, 2);
  EXPECT_EQ(dag.edges().size(), 1u);
}

TEST(CircuitDag, ChainHasSingletonFrontier) {
  const auto dag = CircuitDag::build(4, GateList{{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(ids(dag.frontier()), (std::vector<int>{0}));
  EXPECT_EQ(dag.gate(2).layer, 3);
}

TEST(CircuitDag, DeleteFrontierGate) {
  auto dag = CircuitDag::build(5, GateList{{3, 0}, {2, 4}, {0, 1}});
  dag.delete_gate(0);
  EXPECT_EQ(ids(dag.frontier()), (std::vector<int>{1, 2}));
  EXPECT_EQ(dag.gate(2).layer, 1);
  EXPECT_FALSE(dag.contains(0));
}

TEST(CircuitDag, DeleteSingletonEmpties) {
  auto dag = CircuitDag::build(2, GateList{{1, 0}});
  dag.delete_gate(0);
  EXPECT_TRUE(dag.empty());
  EXPECT_EQ(dag.num_remaining(), 0);
}

TEST(CircuitDag, DeleteNonFrontierIsContractViolation) {
  auto dag = CircuitDag::build(5, GateList{{3, 0}, {2, 4}, {0, 1}});
  EXPECT_THROW(dag.delete_gate(2), ContractViolation);
  dag.delete_gate(0);
  EXPECT_THROW(dag.delete_gate(0), ContractViolation);
  EXPECT_THROW(dag.delete_gate(7), ContractViolation);
}

TEST(CircuitDag, RejectsBadQubits) {
  EXPECT_THROW(CircuitDag::build(2, GateList{{0, 2}}), ValidationError);
  EXPECT_THROW(CircuitDag::build(2, GateList{{-1, 0}}), ValidationError);
  EXPECT_THROW(CircuitDag::build(2, GateList{{1, 1}}), ValidationError);
}

TEST(CircuitDagProperty, LayersMatchLongestPathAfterRandomDeletions) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform(6));
    const int m = static_cast<int>(rng.uniform(15));
    GateList list;
    for (int k = 0; k < m; ++k) {
      const int c = static_cast<int>(rng.uniform(n));
      int t = static_cast<int>(rng.uniform(n - 1));
      if (t >= c) ++t;
      list.emplace_back(c, t);
    }
    auto dag = CircuitDag::build(n, list);
    std::vector<bool> removed(m, false);
    int deleted = 0;
    while (true) {
      const auto oracle = layer_oracle(list, removed);
      std::set<int> minimal;
      for (int v = 0; v < m; ++v) {
        if (removed[v]) continue;
        ASSERT_EQ(dag.gate(v).layer, oracle[v]);
        if (oracle[v] == 1) minimal.insert(v);
      }
      const auto front = ids(dag.frontier());
      ASSERT_EQ(std::set<int>(front.begin(), front.end()), minimal);
      // frontier gates are pairwise support-disjoint
      std::set<int> support;
      for (int id : front) {
        ASSERT_TRUE(support.insert(dag.gate(id).control).second);
        ASSERT_TRUE(support.insert(dag.gate(id).target).second);
      }
      // edges respect the order and touch a shared qubit
      for (auto [u, v] : dag.edges()) {
        ASSERT_LT(u, v);
        const auto& a = dag.gate(u);
        const auto& b = dag.gate(v);
        ASSERT_TRUE(a.control == b.control || a.control == b.target || a.target == b.control ||
                    a.target == b.target);
      }
      if (front.empty()) break;
      const int victim = front[rng.uniform(front.size())];
      dag.delete_gate(victim);
      removed[victim] = true;
      ++deleted;
    }
    EXPECT_EQ(deleted, m);
    EXPECT_TRUE(dag.empty());
  }
}

}  // namespace
}  // namespace dqcr
