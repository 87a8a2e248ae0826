#include <gtest/gtest.h>

#include <numeric>

#include "ecsim/cluster.hpp"
#include "ecsim/rng.hpp"

using namespace ecsim;

namespace {

std::vector<NodeId> ids(std::initializer_list<std::uint32_t> v) {
  std::vector<NodeId> out;
  for (auto x : v) out.emplace_back(x);
  return out;
}

// Exhaustive scan: highest residual, smallest id on ties.
NodeId brute_force_ch(const std::vector<NodeId>& members, const EnergyMap& e) {
  NodeId best = members.front();
  for (NodeId n : members) {
    const double a = e.at(n).residual();
    const double b = e.at(best).residual();
    if (a > b || (a == b && n < best)) best = n;
  }
  return best;
}

Cluster make_cluster(const std::vector<NodeId>& members, NodeId ch) {
  Cluster c;
  c.members = members;
  c.ch = ch;
  return c;
}

}  // namespace

TEST(SelectCh, HigherEnergyOfPairWins) {
  EnergyMap e{{NodeId(1), EnergyAccount(5.0, 10.0)}, {NodeId(2), EnergyAccount(3.0, 10.0)}};
  EXPECT_EQ(select_ch(ids({1, 2}), e), NodeId(1));
  EXPECT_EQ(select_ch(ids({2, 1}), e), NodeId(1));
}

TEST(SelectCh, Singleton) {
  EnergyMap e{{NodeId(9), EnergyAccount(1.0)}};
  EXPECT_EQ(select_ch(ids({9}), e), NodeId(9));
}

TEST(SelectCh, EmptyRejected) {
  EXPECT_THROW(select_ch(std::vector<NodeId>{}, EnergyMap{}), InvalidInput);
}

TEST(SelectCh, MatchesBruteForce) {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int size = 1 + static_cast<int>(rng.index(10));
    std::vector<NodeId> members;
    EnergyMap e;
    for (int i = 0; i < size; ++i) {
      NodeId n(static_cast<std::uint32_t>(rng.index(1000)));
      if (e.contains(n)) continue;
      members.push_back(n);
      // Coarse energies so ties occur.
      e[n] = EnergyAccount(static_cast<double>(rng.index(5)), 10.0);
    }
    EXPECT_EQ(select_ch(members, e), brute_force_ch(members, e));
  }
}

TEST(SpScore, Examples) {
  EXPECT_DOUBLE_EQ(compute_sp_score(0.5, EnergyAccount(10.0)).sp_l, 0.5);
  EXPECT_DOUBLE_EQ(compute_sp_score(0.7, EnergyAccount(0.0, 10.0)).sp_l, 0.0);
  EXPECT_NEAR(compute_sp_score(0.8, EnergyAccount(2.5, 10.0)).sp_l, 0.2, 1e-12);
  EXPECT_THROW(compute_sp_score(0.5, EnergyAccount(0.0, 0.0)), InvalidConfiguration);
}

TEST(Candidacy, SharesSumToOne) {
  EnergyMap e{{NodeId(1), EnergyAccount(1.0, 10.0)},
              {NodeId(2), EnergyAccount(3.0, 10.0)},
              {NodeId(3), EnergyAccount(4.0, 10.0)}};
  auto c = candidacy(ids({1, 2, 3}), e);
  EXPECT_NEAR(c[NodeId(2)], 0.375, 1e-12);
  double sum = 0.0;
  for (const auto& [n, v] : c) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(AssignSp, ArgmaxAmongFreshNodes) {
  ServiceLedger ledger;
  // CH is a third node so both candidates are eligible.
  Cluster c = make_cluster(ids({1, 2, 3}), NodeId(3));
  std::map<NodeId, SpScore> s{{NodeId(1), {0.5, 0.9}}, {NodeId(2), {0.5, 0.4}}};
  EXPECT_EQ(assign_sp(c, s, ledger), NodeId(1));
  EXPECT_EQ(ledger.sp_rounds(NodeId(1)), 1);
}

TEST(AssignSp, ServedNodeYields) {
  ServiceLedger ledger;
  ledger.record_sp(NodeId(1));
  Cluster c = make_cluster(ids({1, 2, 3}), NodeId(3));
  std::map<NodeId, SpScore> s{{NodeId(1), {0.5, 0.99}}, {NodeId(2), {0.5, 0.01}}};
  EXPECT_EQ(assign_sp(c, s, ledger), NodeId(2));
}

TEST(AssignSp, SingletonServesBothRoles) {
  ServiceLedger ledger;
  Cluster c = make_cluster(ids({4}), NodeId(4));
  EXPECT_EQ(assign_sp(c, {}, ledger), NodeId(4));
}

TEST(AssignSp, RotationCoversEveryNode) {
  std::vector<NodeId> members;
  EnergyMap e;
  for (std::uint32_t i = 0; i < 10; ++i) {
    members.emplace_back(i);
    e[NodeId(i)] = EnergyAccount(10.0 + i, 20.0);
  }
  ServiceLedger ledger;
  for (int round = 0; round < 50; ++round) {
    auto clusters = elect_roles({members}, e, ledger, round, 10.0);
    ASSERT_EQ(clusters.size(), 1u);
    EXPECT_TRUE(clusters[0].contains(clusters[0].sp));
    EXPECT_TRUE(clusters[0].contains(clusters[0].ch));
  }
  int lo = 1 << 30, hi = 0;
  for (NodeId n : members) {
    lo = std::min(lo, ledger.sp_rounds(n));
    hi = std::max(hi, ledger.sp_rounds(n));
  }
  EXPECT_GE(lo, 1);
  EXPECT_LE(hi - lo, 1);
  // Static energies: the same node is CH every round.
  EXPECT_EQ(ledger.ch_rounds(NodeId(9)), 50);
}

TEST(FormClusters, ConnectedGroupIsOneCluster) {
  Grid grid(3, 3);
  for (std::uint32_t i = 0; i < 5; ++i) grid.place(NodeId(i), {static_cast<int>(i % 3), static_cast<int>(i / 3)});
  auto graph = ConnectivityGraph::from_grid(grid);
  auto cl = form_clusters(graph, grid, ClusterPolicy{});
  ASSERT_EQ(cl.size(), 1u);
  EXPECT_EQ(cl[0].size(), 5u);
}

TEST(FormClusters, TwoComponents) {
  Grid grid(10, 1);
  for (std::uint32_t i = 0; i < 3; ++i) grid.place(NodeId(i), {static_cast<int>(i), 0});
  grid.place(NodeId(3), {8, 0});
  grid.place(NodeId(4), {9, 0});
  auto graph = ConnectivityGraph::from_grid(grid);
  auto cl = form_clusters(graph, grid, ClusterPolicy{});
  ASSERT_EQ(cl.size(), 2u);
  EXPECT_EQ(cl[0].size(), 3u);
  EXPECT_EQ(cl[1].size(), 2u);
}

TEST(FormClusters, PartitionOfNodes) {
  // Union-find oracle over the neighbour relation.
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    Grid grid(8, 8);
    const std::uint32_t n = 25;
    for (std::uint32_t i = 0; i < n; ++i) {
      grid.place(NodeId(i), {static_cast<int>(rng.index(8)), static_cast<int>(rng.index(8))});
    }
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::uint32_t i = 0; i < n; ++i) {
      for (NodeId j : neighbors(grid, NodeId(i))) parent[find(i)] = find(j.value);
    }
    auto graph = ConnectivityGraph::from_grid(grid);
    auto cl = form_clusters(graph, grid, ClusterPolicy{});
    std::set<NodeId> seen;
    for (const auto& members : cl) {
      for (NodeId m : members) {
        EXPECT_TRUE(seen.insert(m).second);
        EXPECT_EQ(find(m.value), find(members.front().value));
      }
    }
    EXPECT_EQ(seen.size(), n);
    std::set<std::uint32_t> roots;
    for (std::uint32_t i = 0; i < n; ++i) roots.insert(find(i));
    EXPECT_EQ(roots.size(), cl.size());
  }
}

TEST(FormClusters, GridPartitionBlocks) {
  Grid grid(4, 4);
  grid.place(NodeId(0), {0, 0});
  grid.place(NodeId(1), {1, 1});
  grid.place(NodeId(2), {2, 2});
  auto graph = ConnectivityGraph::from_grid(grid);
  ClusterPolicy p{ClusterPolicy::Kind::GridPartition, 2};
  auto cl = form_clusters(graph, grid, p);
  ASSERT_EQ(cl.size(), 2u);
  EXPECT_EQ(cl[0], ids({0, 1}));
  EXPECT_EQ(cl[1], ids({2}));
}
