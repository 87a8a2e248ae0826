#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ecsim/core.hpp"
#include "ecsim/topology.hpp"

namespace ecsim {

/// Raised by compute_sleep when the observed channel capacity is zero.
class NoCapacity : public InvalidConfiguration {
public:
  using InvalidConfiguration::InvalidConfiguration;
};

/// Per-node active seconds for the most recent k slots. Index 0 is the
/// oldest retained slot.
class ActivityLedger {
public:
  ActivityLedger(int slots_per_round, double slot_width_s);

  /// Appends one completed slot, dropping the oldest once k are held.
  void record(NodeId node, double active_s);
  const std::deque<double>& series(NodeId node) const;
  /// Cumulative active time over the retained window.
  double active_time(NodeId node) const;

  int slots() const { return slots_; }
  double slot_width() const { return slot_width_; }

private:
  int slots_;
  double slot_width_;
  std::map<NodeId, std::deque<double>> series_;
};

/// S(slot) - S(slot - 1). Empty when slot == 0 or either slot is missing.
std::optional<double> backward_diff(const ActivityLedger& ledger, NodeId node, int slot);

/// Backward difference of the most recent completed slot.
std::optional<double> latest_backward_diff(const ActivityLedger& ledger, NodeId node);

enum class IdleDecision { ToIdle, NoChange };

/// A goes idle when it was active longer than B over the window and nothing
/// is pending for it. Throws InvalidInput if A and B are not in contact.
IdleDecision pairwise_idle_decision(const ActivityLedger& ledger, NodeId a, NodeId b,
                                    double pending_bits_for_a,
                                    const ConnectivityGraph& graph);

/// max(0, (T - max_dp) / n_hops).
double compute_idle(double round_s, double max_dp_s, int n_hops);

struct HopDelay {
  double hosting_s = 0.0;   // time held at the hop before sending
  double transmit_s = 0.0;  // time on the link
};

struct PathDelayRecord {
  std::vector<HopDelay> hops;
  double hosting_total_s = 0.0;
  double transmit_total_s = 0.0;
  double total_s = 0.0;
  int hop_count() const { return static_cast<int>(hops.size()); }
};

/// Sums hosting and transmission delay over every hop.
PathDelayRecord path_delay(std::span<const HopDelay> hops);

struct SleepInputs {
  std::vector<double> capacities_bps;  // C of each link into the node
  std::vector<double> volumes_bits;    // cached volume per holder
  double sup_capacity_bps = 0.0;       // running supremum of sum(C)
  int hops = 1;
  double path_delay_s = 0.0;
  double round_s = 10.0;
  std::vector<double> cache_delays_s;  // hosting delay per holder; empty = none
  double epsilon = 1e-6;
  /// Seconds of channel time the capacity terms are measured over, so that
  /// capacity and cached volume compare in bits.
  double capacity_window_s = 1.0;
};

/// Traffic-aware sleep time:
///   ((sum C - sum V) / sup sum C)^n * d_p
/// with the ratio clamped to [0,1], then kept strictly below the round
/// length and every cache hosting delay in effect.
double compute_sleep(const SleepInputs& in);

/// Sleep granted to the sleep proxy itself: the supremum of the running
/// sums of assigned sleep times divided by n_evals, kept below the round.
/// An empty history yields 0.
double sp_sleep(std::span<const double> history, int n_evals, double round_s,
                double epsilon = 1e-6);

/// Running maximum of a sampled signal over a trailing time window.
class SlidingMax {
public:
  explicit SlidingMax(double window_s) : window_s_(window_s) {}
  void observe(double t, double value);
  /// Maximum of the piecewise-constant signal over [t - window, t].
  double max(double t) const;

private:
  double window_s_;
  std::deque<std::pair<double, double>> samples_;
};

}  // namespace ecsim
