#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "ecsim/config.hpp"
#include "ecsim/report.hpp"
#include "ecsim/scheme.hpp"
#include "ecsim/trace.hpp"

namespace ecsim {

enum class Phase { Active, Idle, Sleep };
std::string_view to_string(Phase p);

struct NodePhase {
  Phase current = Phase::Idle;
  double entered_at_s = 0.0;
  double scheduled_exit_s = std::numeric_limits<double>::infinity();
};

/// What a scheme wants a node to do from `now` on.
struct PhaseDirective {
  Phase phase = Phase::Active;
  double until_s = std::numeric_limits<double>::infinity();
};

struct DispatchContext {
  double round_start_s = 0.0;
  double round_s = std::numeric_limits<double>::infinity();
  /// Sleep time handed out by the traffic-aware scheduler, if any.
  std::optional<double> assigned_sleep_s;
};

/// Pure schedule lookup. Periodic windows are aligned to t = 0; coordinated
/// frames restart at every round start.
PhaseDirective dispatch_scheme(const Scheme& scheme, double now_s,
                               const DispatchContext& ctx = {});

enum class EventKind {
  PacketArrival,
  TxComplete,
  SlotBoundary,
  RoundSetup,
  SleepExpiry,
  IdleExpiry,
  MobilityStep,
  NodeDeath,
  CacheDelivery
};
std::string_view to_string(EventKind k);

struct Event {
  double time_s = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::RoundSetup;
  NodeId node;
  std::uint64_t arg = 0;  // packet index, transmission id, round, or token
};

/// Min-heap on (time, seq); seq is assigned on push, so equal-time events
/// come out in insertion order.
class EventQueue {
public:
  const Event& push(double time_s, EventKind kind, NodeId node = NodeId(0),
                    std::uint64_t arg = 0);
  Event pop();
  const Event& top() const { return heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time_s != b.time_s) return a.time_s > b.time_s;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

struct RunOptions {
  bool keep_trace = false;
  /// Stop after this many events and close every interval at that time;
  /// 0 runs to the horizon.
  std::uint64_t max_events = 0;
};

struct SimulationResult {
  MetricsReport report;
  std::vector<TraceRecord> trace;  // empty unless keep_trace
  std::uint64_t events_processed = 0;
  double end_time_s = 0.0;
};

/// Throws ConfigError for an invalid config before any event runs.
SimulationResult simulate(const ScenarioConfig& config, std::uint64_t seed,
                          const RunOptions& options = {});
MetricsReport run(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace ecsim
