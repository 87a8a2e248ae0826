#include <gtest/gtest.h>

#include <deque>

#include "ecsim/rng.hpp"
#include "ecsim/topology.hpp"

using namespace ecsim;

namespace {

Grid full_grid(int w, int h) {
  Grid g(w, h);
  std::uint32_t id = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) g.place(NodeId(id++), {x, y});
  }
  return g;
}

Grid random_grid(Rng& rng, int nodes, int w, int h) {
  Grid g(w, h);
  for (int i = 0; i < nodes; ++i) {
    g.place(NodeId(static_cast<std::uint32_t>(i)),
            {static_cast<int>(rng.index(static_cast<std::uint64_t>(w))),
             static_cast<int>(rng.index(static_cast<std::uint64_t>(h)))});
  }
  return g;
}

// Plain BFS returning hop counts, independent of the library's routing code.
std::map<NodeId, int> bfs(const Grid& g, NodeId src) {
  std::map<NodeId, int> dist{{src, 0}};
  std::deque<NodeId> q{src};
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop_front();
    const Position pu = g.position(u);
    for (const auto& [v, pv] : g.positions()) {
      if (v == u || dist.contains(v)) continue;
      if (std::abs(pu.x - pv.x) <= 1 && std::abs(pu.y - pv.y) <= 1) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace

TEST(Neighbors, CentreOfFullGridSeesEight) {
  Grid g = full_grid(3, 3);
  EXPECT_EQ(neighbors(g, NodeId(4)).size(), 8u);
}

TEST(Neighbors, CornerSeesThree) {
  Grid g = full_grid(3, 3);
  EXPECT_EQ(neighbors(g, NodeId(0)).size(), 3u);
}

TEST(Neighbors, LoneNodeHasNone) {
  Grid g(5, 5);
  g.place(NodeId(7), {2, 3});
  EXPECT_TRUE(neighbors(g, NodeId(7)).empty());
}

TEST(Neighbors, SharedCellCounts) {
  Grid g(4, 4);
  g.place(NodeId(1), {0, 0});
  g.place(NodeId(2), {0, 0});
  g.place(NodeId(3), {3, 3});
  EXPECT_EQ(neighbors(g, NodeId(1)), std::set<NodeId>{NodeId(2)});
}

TEST(Neighbors, UnplacedNodeThrows) {
  Grid g(3, 3);
  EXPECT_THROW(neighbors(g, NodeId(1)), std::out_of_range);
}

TEST(Neighbors, Symmetric) {
  Rng rng(11);
  Grid g = random_grid(rng, 40, 8, 8);
  for (const auto& [a, pa] : g.positions()) {
    for (NodeId b : neighbors(g, a)) EXPECT_TRUE(neighbors(g, b).contains(a));
  }
}

TEST(MoveStep, ZeroProbabilityNeverMoves) {
  Grid g(5, 5);
  g.place(NodeId(0), {2, 2});
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    MoveOutcome m = move_step(g, NodeId(0), rng, 0.0);
    EXPECT_FALSE(m.moved);
    EXPECT_EQ(m.position, (Position{2, 2}));
  }
}

TEST(MoveStep, CertainMoveGoesToAnAdjacentCell) {
  std::set<std::pair<int, int>> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    Grid g(5, 5);
    g.place(NodeId(0), {2, 2});
    Rng rng(seed);
    MoveOutcome m = move_step(g, NodeId(0), rng, 1.0);
    EXPECT_TRUE(m.moved);
    EXPECT_EQ(std::abs(m.position.x - 2) + std::abs(m.position.y - 2), 1);
    EXPECT_EQ(g.position(NodeId(0)), m.position);
    seen.insert({m.position.x, m.position.y});
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(MoveStep, StaysInBounds) {
  Grid g(2, 2);
  g.place(NodeId(0), {0, 0});
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    move_step(g, NodeId(0), rng, 1.0);
    EXPECT_TRUE(g.in_bounds(g.position(NodeId(0))));
  }
}

TEST(MoveStep, SameSeedSameTrajectory) {
  auto walk = [](std::uint64_t seed) {
    Rng rng(seed);
    Grid g = random_grid(rng, 10, 6, 6);
    std::vector<Position> path;
    for (int step = 0; step < 200; ++step) {
      for (std::uint32_t n = 0; n < 10; ++n) {
        path.push_back(move_step(g, NodeId(n), rng, 0.3).position);
      }
    }
    return path;
  };
  EXPECT_EQ(walk(99), walk(99));
  EXPECT_NE(walk(99), walk(100));
}

TEST(ShortestPath, LineGraph) {
  ConnectivityGraph g;
  g.add_edge(NodeId(1), NodeId(2));
  g.add_edge(NodeId(2), NodeId(3));
  auto p = shortest_hop_path(g, NodeId(1), NodeId(3));
  ASSERT_TRUE(p);
  EXPECT_EQ(*p, (std::vector<NodeId>{NodeId(1), NodeId(2), NodeId(3)}));
}

TEST(ShortestPath, DisconnectedIsNone) {
  ConnectivityGraph g;
  g.add_node(NodeId(1));
  g.add_node(NodeId(2));
  EXPECT_FALSE(shortest_hop_path(g, NodeId(1), NodeId(2)));
}

TEST(ShortestPath, SelfIsDegenerate) {
  ConnectivityGraph g;
  g.add_node(NodeId(4));
  auto p = shortest_hop_path(g, NodeId(4), NodeId(4));
  ASSERT_TRUE(p);
  EXPECT_EQ(*p, std::vector<NodeId>{NodeId(4)});
}

TEST(ShortestPath, TieBreakPrefersSmallerNextHop) {
  // 1-5-9 and 1-3-9 are both two hops.
  ConnectivityGraph g;
  g.add_edge(NodeId(1), NodeId(5));
  g.add_edge(NodeId(5), NodeId(9));
  g.add_edge(NodeId(1), NodeId(3));
  g.add_edge(NodeId(3), NodeId(9));
  auto p = shortest_hop_path(g, NodeId(1), NodeId(9));
  ASSERT_TRUE(p);
  EXPECT_EQ((*p)[1], NodeId(3));
}

TEST(ShortestPath, MatchesBfsOracleOnRandomGraphs) {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    Grid grid = random_grid(rng, 20, 7, 7);
    const auto graph = ConnectivityGraph::from_grid(grid);
    for (std::uint32_t s = 0; s < 20; ++s) {
      const auto oracle = bfs(grid, NodeId(s));
      for (std::uint32_t d = 0; d < 20; ++d) {
        auto p = shortest_hop_path(graph, NodeId(s), NodeId(d));
        auto it = oracle.find(NodeId(d));
        if (it == oracle.end()) {
          EXPECT_FALSE(p);
          continue;
        }
        ASSERT_TRUE(p);
        EXPECT_EQ(static_cast<int>(p->size()) - 1, it->second);
        for (std::size_t k = 1; k < p->size(); ++k) {
          EXPECT_TRUE(graph.connected((*p)[k - 1], (*p)[k]));
        }
        Router router(graph);
        EXPECT_EQ(router.hops(NodeId(s), NodeId(d)), it->second);
        // Reversed routes have the same length.
        auto back = shortest_hop_path(graph, NodeId(d), NodeId(s));
        ASSERT_TRUE(back);
        EXPECT_EQ(back->size(), p->size());
      }
    }
  }
}

TEST(Connectivity, IncrementalRefreshEqualsRebuild) {
  Rng rng(5);
  Grid grid = random_grid(rng, 25, 6, 6);
  auto graph = ConnectivityGraph::from_grid(grid);
  for (int step = 0; step < 300; ++step) {
    NodeId n(static_cast<std::uint32_t>(rng.index(25)));
    if (move_step(grid, n, rng, 0.5).moved) graph.refresh_node(grid, n);
  }
  EXPECT_EQ(graph, ConnectivityGraph::from_grid(grid));
  grid.remove(NodeId(3));
  graph.refresh_node(grid, NodeId(3));
  EXPECT_EQ(graph, ConnectivityGraph::from_grid(grid));
}

TEST(Connectivity, EdgesMatchNeighbourRule) {
  Rng rng(8);
  Grid grid = random_grid(rng, 30, 6, 6);
  const auto graph = ConnectivityGraph::from_grid(grid);
  for (const auto& [n, pos] : grid.positions()) EXPECT_EQ(graph.adjacent(n), neighbors(grid, n));
}
