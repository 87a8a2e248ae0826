#include "ecsim/cluster.hpp"

#include <algorithm>

namespace ecsim {

bool Cluster::contains(NodeId n) const {
  return std::binary_search(members.begin(), members.end(), n);
}

int ServiceLedger::sp_rounds(NodeId n) const {
  auto it = counts_.find(n);
  return it == counts_.end() ? 0 : it->second.sp_rounds;
}

int ServiceLedger::ch_rounds(NodeId n) const {
  auto it = counts_.find(n);
  return it == counts_.end() ? 0 : it->second.ch_rounds;
}

namespace {

double residual_of(const EnergyMap& energies, NodeId n) {
  auto it = energies.find(n);
  if (it == energies.end()) {
    throw InvalidInput("no energy account for node " + to_string(n));
  }
  return it->second.residual();
}

// Winner of one pairwise contact: the node with more remaining energy.
NodeId pair_winner(NodeId i, NodeId j, const EnergyMap& energies) {
  const double ei = residual_of(energies, i);
  const double ej = residual_of(energies, j);
  if (ei > ej) return i;
  if (ej > ei) return j;
  return std::min(i, j);
}

}  // namespace

NodeId select_ch(std::span<const NodeId> members, const EnergyMap& energies) {
  if (members.empty()) {
    throw InvalidInput("select_ch: empty cluster");
  }
  // Pair up neighbours along the member list; survivors of each contact
  // advance, an odd one out advances unopposed.
  std::vector<NodeId> survivors;
  for (std::size_t i = 0; i < members.size(); i += 2) {
    survivors.push_back(i + 1 < members.size()
                            ? pair_winner(members[i], members[i + 1], energies)
                            : members[i]);
  }
  NodeId best = survivors.front();
  for (NodeId n : survivors) best = pair_winner(best, n, energies);
  return best;
}

SpScore compute_sp_score(double c_l, const EnergyAccount& account) {
  if (c_l < 0.0 || c_l > 1.0) {
    throw InvalidInput("compute_sp_score: c_l outside [0,1]");
  }
  if (account.capacity() <= 0.0) {
    throw InvalidConfiguration("compute_sp_score: zero capacity");
  }
  return {c_l, c_l * account.residual() / account.capacity()};
}

std::map<NodeId, double> candidacy(std::span<const NodeId> members,
                                   const EnergyMap& energies) {
  double total = 0.0;
  for (NodeId n : members) total += residual_of(energies, n);
  std::map<NodeId, double> out;
  for (NodeId n : members) {
    out[n] = total > 0.0 ? residual_of(energies, n) / total
                         : 1.0 / static_cast<double>(members.size());
  }
  return out;
}

NodeId assign_sp(const Cluster& cluster, const std::map<NodeId, SpScore>& scores,
                 ServiceLedger& ledger) {
  if (cluster.members.empty()) {
    throw InvalidInput("assign_sp: empty cluster");
  }
  int fewest = ledger.sp_rounds(cluster.members.front());
  for (NodeId n : cluster.members) fewest = std::min(fewest, ledger.sp_rounds(n));

  std::vector<NodeId> pool;
  for (NodeId n : cluster.members) {
    if (ledger.sp_rounds(n) == fewest && n != cluster.ch) pool.push_back(n);
  }
  if (pool.empty()) pool.push_back(cluster.ch);

  auto score = [&](NodeId n) {
    auto it = scores.find(n);
    return it == scores.end() ? 0.0 : it->second.sp_l;
  };
  NodeId best = pool.front();
  for (NodeId n : pool) {
    if (score(n) > score(best)) best = n;
  }
  ledger.record_sp(best);
  return best;
}

std::vector<std::vector<NodeId>> form_clusters(const ConnectivityGraph& graph,
                                               const Grid& grid,
                                               const ClusterPolicy& policy) {
  if (policy.kind == ClusterPolicy::Kind::Component) {
    return connected_components(graph);
  }
  const int k = std::max(1, policy.partitions);
  std::map<std::pair<int, int>, std::vector<NodeId>> blocks;
  for (const auto& [node, adj] : graph.adjacency()) {
    const Position p = grid.position(node);
    blocks[{p.x * k / grid.width(), p.y * k / grid.height()}].push_back(node);
  }
  std::vector<std::vector<NodeId>> out;
  for (auto& [key, members] : blocks) out.push_back(std::move(members));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::vector<Cluster> elect_roles(const std::vector<std::vector<NodeId>>& member_sets,
                                 const EnergyMap& energies, ServiceLedger& ledger,
                                 int round_index, double round_length_s) {
  std::vector<Cluster> out;
  out.reserve(member_sets.size());
  for (const auto& members : member_sets) {
    Cluster c;
    c.members = members;
    std::sort(c.members.begin(), c.members.end());
    c.round_index = round_index;
    c.round_length_s = round_length_s;
    c.ch = select_ch(c.members, energies);
    ledger.record_ch(c.ch);

    std::map<NodeId, SpScore> scores;
    for (const auto& [n, c_l] : candidacy(c.members, energies)) {
      scores[n] = compute_sp_score(c_l, energies.at(n));
    }
    c.sp = assign_sp(c, scores, ledger);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace ecsim
