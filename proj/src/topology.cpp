#include "ecsim/topology.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace ecsim {

Grid::Grid(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw InvalidInput("grid dimensions must be >= 1");
  }
}

bool Grid::in_bounds(Position p) const {
  return p.x >= 0 && p.x < width_ && p.y >= 0 && p.y < height_;
}

void Grid::place(NodeId node, Position p) {
  if (!in_bounds(p)) {
    throw InvalidInput("grid: position out of bounds");
  }
  remove(node);
  positions_[node] = p;
  occupancy_[p].insert(node);
}

void Grid::remove(NodeId node) {
  auto it = positions_.find(node);
  if (it == positions_.end()) return;
  auto cell = occupancy_.find(it->second);
  cell->second.erase(node);
  if (cell->second.empty()) occupancy_.erase(cell);
  positions_.erase(it);
}

Position Grid::position(NodeId node) const {
  auto it = positions_.find(node);
  if (it == positions_.end()) {
    throw std::out_of_range("grid: node " + to_string(node) + " is not placed");
  }
  return it->second;
}

const std::set<NodeId>& Grid::occupants(Position p) const {
  static const std::set<NodeId> empty;
  auto it = occupancy_.find(p);
  return it == occupancy_.end() ? empty : it->second;
}

std::set<NodeId> neighbors(const Grid& grid, NodeId node) {
  const Position c = grid.position(node);
  std::set<NodeId> out;
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      const Position p{c.x + dx, c.y + dy};
      if (!grid.in_bounds(p)) continue;
      for (NodeId other : grid.occupants(p)) {
        if (other != node) out.insert(other);
      }
    }
  }
  return out;
}

MoveOutcome move_step(Grid& grid, NodeId node, Rng& rng, double p_move) {
  if (p_move < 0.0 || p_move > 1.0) {
    throw InvalidInput("move_step: p_move outside [0,1]");
  }
  const Position here = grid.position(node);
  if (p_move == 0.0 || !rng.bernoulli(p_move)) {
    return {here, false};
  }
  static constexpr Position kSteps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  std::vector<Position> options;
  for (Position s : kSteps) {
    const Position p{here.x + s.x, here.y + s.y};
    if (grid.in_bounds(p)) options.push_back(p);
  }
  if (options.empty()) return {here, false};  // 1x1 grid
  const Position next = options[rng.index(options.size())];
  grid.place(node, next);
  return {next, true};
}

ConnectivityGraph ConnectivityGraph::from_grid(const Grid& grid) {
  ConnectivityGraph g;
  for (const auto& [node, pos] : grid.positions()) {
    g.adjacency_[node] = neighbors(grid, node);
  }
  return g;
}

void ConnectivityGraph::refresh_node(const Grid& grid, NodeId node) {
  auto it = adjacency_.find(node);
  if (it != adjacency_.end()) {
    for (NodeId other : it->second) adjacency_[other].erase(node);
  }
  if (!grid.placed(node)) {
    adjacency_.erase(node);
    return;
  }
  auto fresh = neighbors(grid, node);
  for (NodeId other : fresh) adjacency_[other].insert(node);
  adjacency_[node] = std::move(fresh);
}

void ConnectivityGraph::add_edge(NodeId a, NodeId b) {
  if (a == b) throw InvalidInput("graph: self-loop");
  adjacency_[a].insert(b);
  adjacency_[b].insert(a);
}

const std::set<NodeId>& ConnectivityGraph::adjacent(NodeId n) const {
  static const std::set<NodeId> empty;
  auto it = adjacency_.find(n);
  return it == adjacency_.end() ? empty : it->second;
}

bool ConnectivityGraph::connected(NodeId a, NodeId b) const {
  return adjacent(a).contains(b);
}

std::map<NodeId, int> hop_distances(const ConnectivityGraph& graph, NodeId origin) {
  std::map<NodeId, int> dist;
  if (!graph.contains(origin)) return dist;
  std::deque<NodeId> frontier{origin};
  dist[origin] = 0;
  while (!frontier.empty()) {
    const NodeId cur = frontier.front();
    frontier.pop_front();
    for (NodeId nb : graph.adjacent(cur)) {
      if (dist.emplace(nb, dist[cur] + 1).second) frontier.push_back(nb);
    }
  }
  return dist;
}

namespace {

// Smallest-id neighbour one hop closer to the destination.
std::optional<NodeId> descend(const ConnectivityGraph& graph,
                              const std::map<NodeId, int>& to_dst, NodeId at) {
  auto here = to_dst.find(at);
  if (here == to_dst.end() || here->second == 0) return std::nullopt;
  for (NodeId nb : graph.adjacent(at)) {  // std::set iterates in id order
    auto d = to_dst.find(nb);
    if (d != to_dst.end() && d->second == here->second - 1) return nb;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<NodeId>> shortest_hop_path(const ConnectivityGraph& graph,
                                                     NodeId src, NodeId dst) {
  if (src == dst) return std::vector<NodeId>{src};
  const auto to_dst = hop_distances(graph, dst);
  if (!to_dst.contains(src)) return std::nullopt;
  std::vector<NodeId> path{src};
  NodeId at = src;
  while (at != dst) {
    at = *descend(graph, to_dst, at);
    path.push_back(at);
  }
  return path;
}

std::vector<std::vector<NodeId>> connected_components(const ConnectivityGraph& graph) {
  std::vector<std::vector<NodeId>> out;
  std::set<NodeId> seen;
  for (const auto& [node, adj] : graph.adjacency()) {
    if (seen.contains(node)) continue;
    std::vector<NodeId> comp;
    for (const auto& [member, d] : hop_distances(graph, node)) {
      seen.insert(member);
      comp.push_back(member);
    }
    out.push_back(std::move(comp));
  }
  return out;
}

const std::map<NodeId, int>& Router::table(NodeId dst) const {
  auto it = tables_.find(dst);
  if (it == tables_.end()) {
    it = tables_.emplace(dst, hop_distances(*graph_, dst)).first;
  }
  return it->second;
}

std::optional<NodeId> Router::next_hop(NodeId at, NodeId dst) const {
  if (at == dst) return std::nullopt;
  return descend(*graph_, table(dst), at);
}

std::optional<int> Router::hops(NodeId src, NodeId dst) const {
  const auto& t = table(dst);
  auto it = t.find(src);
  if (it == t.end()) return std::nullopt;
  return it->second;
}

}  // namespace ecsim
