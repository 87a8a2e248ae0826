#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ecsim/core.hpp"
#include "ecsim/traffic.hpp"

namespace ecsim {

enum class LossReason { SleepingHop, CacheFull, Deadline, Overflow, NodeDeath };
std::string_view to_string(LossReason r);

enum class Role { ClusterHead, SleepProxy };

namespace trace {

/// The node leaves `from` after `dur_s` seconds in it.
struct ModeChange {
  NodeId node;
  RadioMode from = RadioMode::Idle;
  RadioMode to = RadioMode::Idle;
  double dur_s = 0.0;
};
struct Death {
  NodeId node;
  RadioMode from = RadioMode::Idle;
  double dur_s = 0.0;
};
/// Closing interval of a node still alive at the horizon.
struct HorizonEnd {
  NodeId node;
  RadioMode mode = RadioMode::Idle;
  double dur_s = 0.0;
};
struct Generated {
  NodeId src;
  NodeId dst;
  std::uint64_t packet = 0;
  double bits = 0.0;
  PacketClass cls = PacketClass::Elastic;
  bool dst_asleep = false;
};
struct Cached {
  NodeId holder;
  NodeId target;
  std::uint64_t packet = 0;
  bool fallback = false;  // stored on a neighbour of the target, not the sender
};
struct Lost {
  NodeId at;
  std::uint64_t packet = 0;
  LossReason reason = LossReason::SleepingHop;
};
struct Delivered {
  NodeId dst;
  std::uint64_t packet = 0;
  double delay_s = 0.0;
  bool on_time = true;
  double path_delay_s = 0.0;  // sum of per-hop hosting and link time
};
struct RoleAssigned {
  NodeId node;
  Role role = Role::ClusterHead;
  int round = 0;
};
struct SleepAssigned {
  NodeId node;
  double computed_s = 0.0;
  double actual_s = 0.0;
  double round_s = 0.0;
  std::optional<double> min_hosting_s;  // empty: nothing cached for the node
};
struct RoundStarted {
  int round = 0;
  int clusters = 0;
  int alive = 0;
};

}  // namespace trace

using TraceEvent =
    std::variant<trace::ModeChange, trace::Death, trace::HorizonEnd, trace::Generated,
                 trace::Cached, trace::Lost, trace::Delivered, trace::RoleAssigned,
                 trace::SleepAssigned, trace::RoundStarted>;

struct TraceRecord {
  double time_s = 0.0;
  TraceEvent event;
};

/// Columns: time,node,kind,detail. Durations and delays in `detail` are
/// printed with round-trip precision so a replay reproduces the report.
void write_trace_header(std::ostream& out);
void write_trace_row(std::ostream& out, const TraceRecord& record);
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records);

/// Inverse of write_trace_csv. Throws InvalidInput naming the bad line.
std::vector<TraceRecord> parse_trace_csv(std::istream& in);

}  // namespace ecsim
