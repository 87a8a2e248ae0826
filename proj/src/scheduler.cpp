#include "ecsim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ecsim {

ActivityLedger::ActivityLedger(int slots_per_round, double slot_width_s)
    : slots_(slots_per_round), slot_width_(slot_width_s) {
  if (slots_per_round < 1 || !(slot_width_s > 0.0)) {
    throw InvalidInput("activity ledger needs k >= 1 and a positive slot width");
  }
}

void ActivityLedger::record(NodeId node, double active_s) {
  constexpr double kSlack = 1e-9;
  if (active_s < -kSlack || active_s > slot_width_ + kSlack) {
    throw InvalidInput("activity ledger: slot value outside [0, slot width]");
  }
  auto& s = series_[node];
  s.push_back(std::clamp(active_s, 0.0, slot_width_));
  while (static_cast<int>(s.size()) > slots_) s.pop_front();
}

const std::deque<double>& ActivityLedger::series(NodeId node) const {
  static const std::deque<double> empty;
  auto it = series_.find(node);
  return it == series_.end() ? empty : it->second;
}

double ActivityLedger::active_time(NodeId node) const {
  const auto& s = series(node);
  return std::accumulate(s.begin(), s.end(), 0.0);
}

std::optional<double> backward_diff(const ActivityLedger& ledger, NodeId node, int slot) {
  const auto& s = ledger.series(node);
  if (slot < 1 || slot >= static_cast<int>(s.size())) return std::nullopt;
  return s[slot] - s[slot - 1];
}

std::optional<double> latest_backward_diff(const ActivityLedger& ledger, NodeId node) {
  return backward_diff(ledger, node, static_cast<int>(ledger.series(node).size()) - 1);
}

IdleDecision pairwise_idle_decision(const ActivityLedger& ledger, NodeId a, NodeId b,
                                    double pending_bits_for_a,
                                    const ConnectivityGraph& graph) {
  if (!graph.connected(a, b)) {
    throw InvalidInput("pairwise comparison needs nodes in direct contact");
  }
  if (pending_bits_for_a > 0.0) return IdleDecision::NoChange;
  return ledger.active_time(a) > ledger.active_time(b) ? IdleDecision::ToIdle
                                                       : IdleDecision::NoChange;
}

double compute_idle(double round_s, double max_dp_s, int n_hops) {
  if (n_hops < 1) throw InvalidInput("compute_idle: n_hops must be >= 1");
  if (!(round_s > 0.0)) throw InvalidInput("compute_idle: round length must be > 0");
  return std::max(0.0, (round_s - max_dp_s) / n_hops);
}

PathDelayRecord path_delay(std::span<const HopDelay> hops) {
  if (hops.empty()) throw InvalidInput("path_delay: empty path");
  PathDelayRecord rec;
  rec.hops.assign(hops.begin(), hops.end());
  for (const HopDelay& h : hops) {
    if (h.hosting_s < 0.0 || h.transmit_s < 0.0) {
      throw InvalidInput("path_delay: negative hop delay");
    }
    rec.hosting_total_s += h.hosting_s;
    rec.transmit_total_s += h.transmit_s;
  }
  rec.total_s = rec.hosting_total_s + rec.transmit_total_s;
  return rec;
}

double compute_sleep(const SleepInputs& in) {
  if (in.hops < 1) throw InvalidInput("compute_sleep: hops must be >= 1");
  if (!(in.round_s > 0.0)) throw InvalidInput("compute_sleep: round length must be > 0");
  if (in.path_delay_s < 0.0) throw InvalidInput("compute_sleep: negative path delay");
  if (!(in.sup_capacity_bps > 0.0)) throw NoCapacity("compute_sleep: no channel capacity");

  const double sum_c = std::accumulate(in.capacities_bps.begin(), in.capacities_bps.end(), 0.0);
  const double sum_v = std::accumulate(in.volumes_bits.begin(), in.volumes_bits.end(), 0.0);
  if (sum_c > in.sup_capacity_bps * (1.0 + 1e-12)) {
    throw InvalidInput("compute_sleep: supremum below current capacity");
  }
  const double window = in.capacity_window_s;
  double ratio = (sum_c * window - sum_v) / (in.sup_capacity_bps * window);
  ratio = std::clamp(ratio, 0.0, 1.0);
  const double raw = std::pow(ratio, in.hops) * in.path_delay_s;

  double bound = (1.0 - in.epsilon) * in.round_s;
  for (double d : in.cache_delays_s) bound = std::min(bound, (1.0 - in.epsilon) * d);
  return std::max(0.0, std::min(raw, bound));
}

double sp_sleep(std::span<const double> history, int n_evals, double round_s,
                double epsilon) {
  if (history.empty()) return 0.0;
  if (n_evals < 1) throw InvalidInput("sp_sleep: n_evals must be >= 1");
  double running = 0.0;
  double best = 0.0;
  for (double t : history) {
    running += t;
    best = std::max(best, running / n_evals);
  }
  return std::min(best, (1.0 - epsilon) * round_s);
}

void SlidingMax::observe(double t, double value) {
  samples_.emplace_back(t, value);
  // A sample stays in effect until the next one, so drop a sample only once
  // its successor is older than the window.
  while (samples_.size() > 1 && samples_[1].first < t - window_s_) samples_.pop_front();
}

double SlidingMax::max(double t) const {
  double best = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const bool in_effect = i + 1 == samples_.size() || samples_[i + 1].first >= t - window_s_;
    if (in_effect) best = std::max(best, samples_[i].second);
  }
  return best;
}

}  // namespace ecsim
