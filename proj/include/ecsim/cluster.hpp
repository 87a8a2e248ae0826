#pragma once

#include <map>
#include <span>
#include <vector>

#include "ecsim/core.hpp"
#include "ecsim/topology.hpp"

namespace ecsim {

struct Cluster {
  std::vector<NodeId> members;  // sorted
  NodeId ch;
  NodeId sp;
  int round_index = 0;
  double round_length_s = 10.0;

  bool contains(NodeId n) const;
};

/// CH candidacy and sleep-proxy likelihood of one node.
struct SpScore {
  double c_l = 0.0;
  double sp_l = 0.0;
};

/// Per-node record of how often each role was served.
class ServiceLedger {
public:
  struct Counts {
    int sp_rounds = 0;
    int ch_rounds = 0;
  };

  explicit ServiceLedger(double intermeeting_window_s = 0.0)
      : intermeeting_window_s_(intermeeting_window_s) {}

  void record_sp(NodeId n) { counts_[n].sp_rounds += 1; }
  void record_ch(NodeId n) { counts_[n].ch_rounds += 1; }
  int sp_rounds(NodeId n) const;
  int ch_rounds(NodeId n) const;
  double intermeeting_window() const { return intermeeting_window_s_; }
  void set_intermeeting_window(double s) { intermeeting_window_s_ = s; }
  const std::map<NodeId, Counts>& counts() const { return counts_; }

private:
  std::map<NodeId, Counts> counts_;
  double intermeeting_window_s_;
};

using EnergyMap = std::map<NodeId, EnergyAccount>;

/// Pairwise residual-energy tournament followed by a max over the
/// survivors. Equivalent to argmax(residual) with the smallest id winning
/// ties. Throws InvalidInput on an empty member set.
NodeId select_ch(std::span<const NodeId> members, const EnergyMap& energies);

/// sp_l = c_l * residual / capacity.
SpScore compute_sp_score(double c_l, const EnergyAccount& account);

/// c_l of every member: its share of the cluster's total residual energy.
std::map<NodeId, double> candidacy(std::span<const NodeId> members,
                                   const EnergyMap& energies);

/// Picks the next sleep proxy and records the service in the ledger.
/// Only members with the fewest SP rounds are eligible; among those the
/// highest sp_l wins (smallest id on ties). The CH is passed over while any
/// other member shares the minimum count.
NodeId assign_sp(const Cluster& cluster, const std::map<NodeId, SpScore>& scores,
                 ServiceLedger& ledger);

struct ClusterPolicy {
  enum class Kind { Component, GridPartition } kind = Kind::Component;
  int partitions = 1;  // k for a k x k partition
};

/// Member sets for the current topology, ordered by smallest member.
std::vector<std::vector<NodeId>> form_clusters(const ConnectivityGraph& graph,
                                               const Grid& grid,
                                               const ClusterPolicy& policy);

/// Runs CH election and SP assignment for every member set.
std::vector<Cluster> elect_roles(const std::vector<std::vector<NodeId>>& member_sets,
                                 const EnergyMap& energies, ServiceLedger& ledger,
                                 int round_index, double round_length_s);

}  // namespace ecsim
