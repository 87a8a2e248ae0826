#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ecsim/core.hpp"
#include "ecsim/rng.hpp"

namespace ecsim {

enum class PacketClass { DelaySensitive, Elastic };

std::string_view to_string(PacketClass c);

struct Packet {
  std::uint64_t id = 0;
  NodeId src;
  NodeId dst;
  double size_bits = 0.0;
  PacketClass cls = PacketClass::Elastic;
  double deadline_s = 0.0;  // absolute; meaningful for DelaySensitive only
  double created_at_s = 0.0;

  /// Checks size > 0 and, for delay-sensitive packets, deadline > created_at.
  void validate() const;
};

struct BurstSpec {
  double mean_on_s = 1.0;
  double mean_off_s = 0.0;
};

struct FlowSpec {
  NodeId src;
  NodeId dst;
  double rate_pps = 0.0;
  double packet_bits = 8000.0;
  double delay_sensitive_fraction = 0.3;
  std::optional<BurstSpec> burst;  // absent: always on
};

/// Poisson arrivals per flow, gated by exponential on/off periods when a
/// burst spec is given. Output is ordered by (created_at, id); ids are the
/// positions in that order. Delay-sensitive packets get
/// deadline = created_at + deadline_offset_s.
std::vector<Packet> generate(std::span<const FlowSpec> flows, double horizon_s, Rng& rng,
                             double deadline_offset_s);

/// Seconds to push `size_bits` through a link of `capacity_bps`.
double tx_delay(double size_bits, double capacity_bps);

PacketClass classify(const Packet& packet);

/// False only for a delay-sensitive packet that arrives after its deadline.
bool deadline_met(const Packet& packet, double delivered_at_s);

/// id,src,dst,size,class,deadline,created_at
void write_traffic_csv(std::ostream& out, std::span<const Packet> packets);

}  // namespace ecsim
