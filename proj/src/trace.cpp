#include "ecsim/trace.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace ecsim {

std::string_view to_string(LossReason r) {
  switch (r) {
    case LossReason::SleepingHop: return "sleeping-hop";
    case LossReason::CacheFull: return "cache-full";
    case LossReason::Deadline: return "deadline";
    case LossReason::Overflow: return "overflow";
    case LossReason::NodeDeath: return "node-death";
  }
  return "?";
}

namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view role_name(Role r) { return r == Role::ClusterHead ? "CH" : "SP"; }

struct Row {
  std::string node;
  std::string kind;
  std::string detail;
};

struct RowBuilder {
  std::optional<NodeId> node;
  std::string kind;
  std::ostringstream detail;

  template <typename T>
  RowBuilder& kv(std::string_view key, const T& value) {
    if (detail.tellp() > 0) detail << ' ';
    detail << key << '=' << value;
    return *this;
  }
};

void describe(RowBuilder& b, const trace::ModeChange& e) {
  b.node = e.node;
  b.kind = "Mode";
  b.kv("from", to_string(e.from)).kv("to", to_string(e.to)).kv("dur", exact(e.dur_s));
}
void describe(RowBuilder& b, const trace::Death& e) {
  b.node = e.node;
  b.kind = "Death";
  b.kv("from", to_string(e.from)).kv("dur", exact(e.dur_s));
}
void describe(RowBuilder& b, const trace::HorizonEnd& e) {
  b.node = e.node;
  b.kind = "End";
  b.kv("mode", to_string(e.mode)).kv("dur", exact(e.dur_s));
}
void describe(RowBuilder& b, const trace::Generated& e) {
  b.node = e.src;
  b.kind = "Generated";
  b.kv("pkt", e.packet).kv("dst", e.dst.value).kv("bits", exact(e.bits));
  b.kv("class", to_string(e.cls)).kv("dst_asleep", e.dst_asleep ? 1 : 0);
}
void describe(RowBuilder& b, const trace::Cached& e) {
  b.node = e.holder;
  b.kind = "Cached";
  b.kv("pkt", e.packet).kv("target", e.target.value).kv("fallback", e.fallback ? 1 : 0);
}
void describe(RowBuilder& b, const trace::Lost& e) {
  b.node = e.at;
  b.kind = "Lost";
  b.kv("pkt", e.packet).kv("reason", to_string(e.reason));
}
void describe(RowBuilder& b, const trace::Delivered& e) {
  b.node = e.dst;
  b.kind = "Delivered";
  b.kv("pkt", e.packet).kv("delay", exact(e.delay_s)).kv("on_time", e.on_time ? 1 : 0);
  b.kv("path_delay", exact(e.path_delay_s));
}
void describe(RowBuilder& b, const trace::RoleAssigned& e) {
  b.node = e.node;
  b.kind = "Role";
  b.kv("role", role_name(e.role)).kv("round", e.round);
}
void describe(RowBuilder& b, const trace::SleepAssigned& e) {
  b.node = e.node;
  b.kind = "SleepAssign";
  b.kv("computed", exact(e.computed_s)).kv("actual", exact(e.actual_s));
  b.kv("round_s", exact(e.round_s));
  b.kv("min_hosting", e.min_hosting_s ? exact(*e.min_hosting_s) : std::string("none"));
}
void describe(RowBuilder& b, const trace::RoundStarted& e) {
  b.kind = "RoundSetup";
  b.kv("round", e.round).kv("clusters", e.clusters).kv("alive", e.alive);
}

class Fields {
public:
  Fields(std::string_view detail, std::size_t line) : line_(line) {
    std::istringstream in{std::string(detail)};
    std::string tok;
    while (in >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) fail("malformed field '" + tok + "'");
      values_[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail("missing field '" + key + "'");
    return it->second;
  }
  double num(const std::string& key) const {
    const std::string& s = str(key);
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail("bad number in '" + key + "'");
    }
  }
  std::uint64_t u64(const std::string& key) const {
    const std::string& s = str(key);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail("bad integer in '" + key + "'");
    return v;
  }
  int i32(const std::string& key) const { return static_cast<int>(u64(key)); }
  NodeId node(const std::string& key) const {
    return NodeId(static_cast<std::uint32_t>(u64(key)));
  }
  bool flag(const std::string& key) const { return u64(key) != 0; }
  RadioMode mode(const std::string& key) const {
    const std::string& s = str(key);
    for (RadioMode m : {RadioMode::ActiveTx, RadioMode::ActiveRx, RadioMode::Idle,
                        RadioMode::Sleep}) {
      if (to_string(m) == s) return m;
    }
    fail("unknown radio mode '" + s + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("trace line " + std::to_string(line_) + ": " + what);
  }

private:
  std::map<std::string, std::string> values_;
  std::size_t line_;
};

TraceEvent decode(const Row& row, const Fields& f) {
  auto node = [&] {
    NodeId n;
    auto [p, ec] = std::from_chars(row.node.data(), row.node.data() + row.node.size(), n.value);
    if (ec != std::errc() || row.node.empty()) f.fail("missing node id");
    return n;
  };
  const std::string& k = row.kind;
  if (k == "Mode") return trace::ModeChange{node(), f.mode("from"), f.mode("to"), f.num("dur")};
  if (k == "Death") return trace::Death{node(), f.mode("from"), f.num("dur")};
  if (k == "End") return trace::HorizonEnd{node(), f.mode("mode"), f.num("dur")};
  if (k == "Generated") {
    const std::string& c = f.str("class");
    PacketClass cls = PacketClass::Elastic;
    if (c == to_string(PacketClass::DelaySensitive)) {
      cls = PacketClass::DelaySensitive;
    } else if (c != to_string(PacketClass::Elastic)) {
      f.fail("unknown packet class '" + c + "'");
    }
    return trace::Generated{node(), f.node("dst"), f.u64("pkt"), f.num("bits"), cls,
                            f.flag("dst_asleep")};
  }
  if (k == "Cached") {
    return trace::Cached{node(), f.node("target"), f.u64("pkt"), f.flag("fallback")};
  }
  if (k == "Lost") {
    const std::string& r = f.str("reason");
    for (LossReason reason : {LossReason::SleepingHop, LossReason::CacheFull,
                              LossReason::Deadline, LossReason::Overflow,
                              LossReason::NodeDeath}) {
      if (to_string(reason) == r) return trace::Lost{node(), f.u64("pkt"), reason};
    }
    f.fail("unknown loss reason '" + r + "'");
  }
  if (k == "Delivered") {
    return trace::Delivered{node(), f.u64("pkt"), f.num("delay"), f.flag("on_time"),
                            f.num("path_delay")};
  }
  if (k == "Role") {
    const std::string& r = f.str("role");
    if (r != "CH" && r != "SP") f.fail("unknown role '" + r + "'");
    return trace::RoleAssigned{node(), r == "CH" ? Role::ClusterHead : Role::SleepProxy,
                               f.i32("round")};
  }
  if (k == "SleepAssign") {
    std::optional<double> hosting;
    if (f.str("min_hosting") != "none") hosting = f.num("min_hosting");
    return trace::SleepAssigned{node(), f.num("computed"), f.num("actual"), f.num("round_s"),
                                hosting};
  }
  if (k == "RoundSetup") {
    return trace::RoundStarted{f.i32("round"), f.i32("clusters"), f.i32("alive")};
  }
  f.fail("unknown kind '" + k + "'");
}

}  // namespace

void write_trace_header(std::ostream& out) { out << "time,node,kind,detail\n"; }

void write_trace_row(std::ostream& out, const TraceRecord& record) {
  RowBuilder b;
  std::visit([&](const auto& e) { describe(b, e); }, record.event);
  char t[32];
  std::snprintf(t, sizeof t, "%.6f", record.time_s);
  out << t << ',';
  if (b.node) out << b.node->value;
  out << ',' << b.kind << ',' << b.detail.str() << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records) {
  write_trace_header(out);
  for (const auto& r : records) write_trace_row(out, r);
}

std::vector<TraceRecord> parse_trace_csv(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != "time,node,kind,detail") {
        throw InvalidInput("trace line 1: unexpected header");
      }
      continue;
    }
    if (line.empty()) continue;
    std::size_t c1 = line.find(',');
    std::size_t c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    std::size_t c3 = c2 == std::string::npos ? c2 : line.find(',', c2 + 1);
    if (c3 == std::string::npos) {
      throw InvalidInput("trace line " + std::to_string(lineno) + ": expected 4 columns");
    }
    Row row{line.substr(c1 + 1, c2 - c1 - 1), line.substr(c2 + 1, c3 - c2 - 1),
            line.substr(c3 + 1)};
    Fields fields(row.detail, lineno);
    TraceRecord rec;
    try {
      rec.time_s = std::stod(line.substr(0, c1));
    } catch (const std::exception&) {
      fields.fail("bad time");
    }
    rec.event = decode(row, fields);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace ecsim
