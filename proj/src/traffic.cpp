#include "ecsim/traffic.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "ecsim/scheduler.hpp"

namespace ecsim {

std::string_view to_string(PacketClass c) {
  return c == PacketClass::DelaySensitive ? "DelaySensitive" : "Elastic";
}

void Packet::validate() const {
  if (!(size_bits > 0.0)) throw InvalidInput("packet size must be > 0");
  if (cls == PacketClass::DelaySensitive && !(deadline_s > created_at_s)) {
    throw InvalidInput("delay-sensitive packet needs deadline > created_at");
  }
}

namespace {

struct Arrival {
  double t;
  std::size_t flow;
  PacketClass cls;
};

void arrivals_for_flow(const FlowSpec& f, std::size_t index, double horizon, Rng& rng,
                       std::vector<Arrival>& out) {
  if (!(f.rate_pps > 0.0)) return;
  auto draw_class = [&] {
    return rng.bernoulli(f.delay_sensitive_fraction) ? PacketClass::DelaySensitive
                                                     : PacketClass::Elastic;
  };
  if (!f.burst || !(f.burst->mean_off_s > 0.0)) {
    for (double t = rng.exponential(f.rate_pps); t < horizon; t += rng.exponential(f.rate_pps)) {
      out.push_back({t, index, draw_class()});
    }
    return;
  }
  const BurstSpec& b = *f.burst;
  const double p_on = b.mean_on_s / (b.mean_on_s + b.mean_off_s);
  bool on = rng.bernoulli(p_on);
  double t = 0.0;
  while (t < horizon) {
    const double span = rng.exponential(1.0 / (on ? b.mean_on_s : b.mean_off_s));
    const double end = std::min(t + span, horizon);
    if (on) {
      // Memoryless arrivals: an arrival overrunning the on period is discarded.
      for (double a = t + rng.exponential(f.rate_pps); a < end; a += rng.exponential(f.rate_pps)) {
        out.push_back({a, index, draw_class()});
      }
    }
    t = end;
    on = !on;
  }
}

}  // namespace

std::vector<Packet> generate(std::span<const FlowSpec> flows, double horizon_s, Rng& rng,
                             double deadline_offset_s) {
  if (!(horizon_s > 0.0)) return {};
  const std::uint64_t base = rng.next_u64();
  std::vector<Arrival> arrivals;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    if (flows[i].rate_pps < 0.0) throw InvalidInput("flow rate must be >= 0");
    Rng flow_rng = Rng::stream(base, i);
    arrivals_for_flow(flows[i], i, horizon_s, flow_rng, arrivals);
  }
  std::stable_sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
    return a.t < b.t || (a.t == b.t && a.flow < b.flow);
  });
  std::vector<Packet> out;
  out.reserve(arrivals.size());
  for (const Arrival& a : arrivals) {
    const FlowSpec& f = flows[a.flow];
    Packet p;
    p.id = out.size();
    p.src = f.src;
    p.dst = f.dst;
    p.size_bits = f.packet_bits;
    p.cls = a.cls;
    p.created_at_s = a.t;
    p.deadline_s = a.cls == PacketClass::DelaySensitive ? a.t + deadline_offset_s : 0.0;
    p.validate();
    out.push_back(p);
  }
  return out;
}

double tx_delay(double size_bits, double capacity_bps) {
  if (!(capacity_bps > 0.0)) throw NoCapacity("tx_delay: zero capacity");
  if (size_bits < 0.0) throw InvalidInput("tx_delay: negative size");
  return size_bits / capacity_bps;
}

PacketClass classify(const Packet& packet) { return packet.cls; }

bool deadline_met(const Packet& packet, double delivered_at_s) {
  return packet.cls == PacketClass::Elastic || delivered_at_s <= packet.deadline_s;
}

void write_traffic_csv(std::ostream& out, std::span<const Packet> packets) {
  out << "id,src,dst,size,class,deadline,created_at\n";
  char buf[64];
  for (const Packet& p : packets) {
    out << p.id << ',' << p.src.value << ',' << p.dst.value << ',' << p.size_bits << ','
        << to_string(p.cls) << ',';
    if (p.cls == PacketClass::DelaySensitive) {
      std::snprintf(buf, sizeof buf, "%.6f", p.deadline_s);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.6f", p.created_at_s);
    out << ',' << buf << '\n';
  }
}

}  // namespace ecsim
