#pragma once

#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "ecsim/core.hpp"
#include "ecsim/rng.hpp"

namespace ecsim {

struct Position {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Position&, const Position&) = default;
};

/// Cell grid with node occupancy. A cell may hold any number of nodes.
class Grid {
public:
  Grid(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Position p) const;

  void place(NodeId node, Position p);
  void remove(NodeId node);
  bool placed(NodeId node) const { return positions_.contains(node); }
  /// Throws std::out_of_range for an unplaced node.
  Position position(NodeId node) const;
  const std::set<NodeId>& occupants(Position p) const;
  const std::map<NodeId, Position>& positions() const { return positions_; }

private:
  int width_;
  int height_;
  std::map<NodeId, Position> positions_;
  std::map<Position, std::set<NodeId>> occupancy_;
};

/// All other nodes inside the 3x3 block centred on the node's cell.
std::set<NodeId> neighbors(const Grid& grid, NodeId node);

struct MoveOutcome {
  Position position;
  bool moved = false;
};

/// Lazy random walk: with probability p_move step to a uniformly chosen
/// 4-adjacent in-bounds cell.
MoveOutcome move_step(Grid& grid, NodeId node, Rng& rng, double p_move);

/// Undirected adjacency consistent with the 3x3 block rule.
class ConnectivityGraph {
public:
  ConnectivityGraph() = default;
  static ConnectivityGraph from_grid(const Grid& grid);

  /// Rebuilds the edges of `node` after its position changed (or it was
  /// removed from the grid).
  void refresh_node(const Grid& grid, NodeId node);
  void add_edge(NodeId a, NodeId b);
  void add_node(NodeId n) { adjacency_[n]; }

  bool contains(NodeId n) const { return adjacency_.contains(n); }
  const std::set<NodeId>& adjacent(NodeId n) const;
  bool connected(NodeId a, NodeId b) const;
  std::size_t degree(NodeId n) const { return adjacent(n).size(); }
  const std::map<NodeId, std::set<NodeId>>& adjacency() const { return adjacency_; }

  friend bool operator==(const ConnectivityGraph&, const ConnectivityGraph&) = default;

private:
  std::map<NodeId, std::set<NodeId>> adjacency_;
};

/// Minimum-hop path by BFS; among equal-length paths the one whose next hop
/// has the smallest id is chosen at every step. src == dst yields [src].
std::optional<std::vector<NodeId>> shortest_hop_path(const ConnectivityGraph& graph,
                                                     NodeId src, NodeId dst);

/// Hop distances from `origin` to every reachable node.
std::map<NodeId, int> hop_distances(const ConnectivityGraph& graph, NodeId origin);

/// Connected components, each sorted, ordered by smallest member.
std::vector<std::vector<NodeId>> connected_components(const ConnectivityGraph& graph);

/// Next-hop routing over a fixed graph snapshot. Distance tables are built
/// per destination on first use.
class Router {
public:
  explicit Router(const ConnectivityGraph& graph) : graph_(&graph) {}

  std::optional<NodeId> next_hop(NodeId at, NodeId dst) const;
  /// Hop count, or nullopt when unreachable.
  std::optional<int> hops(NodeId src, NodeId dst) const;

private:
  const std::map<NodeId, int>& table(NodeId dst) const;

  const ConnectivityGraph* graph_;
  mutable std::unordered_map<NodeId, std::map<NodeId, int>> tables_;
};

}  // namespace ecsim
