#include "ecsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "ecsim/rng.hpp"

namespace ecsim {

using nlohmann::json;

// Every field is checked whatever the kind, so a bad value is caught even
// before a sweep switches to the scheme that reads it.
std::optional<std::string> Scheme::check() const {
  if (!(duty > 0.0 && duty <= 1.0)) return "scheme.duty must be in (0,1]";
  if (!(period_s > 0.0)) return "scheme.period_s must be > 0";
  if (!(listen_s > 0.0)) return "scheme.listen_s must be > 0";
  if (!(sleep_s > 0.0)) return "scheme.sleep_s must be > 0";
  return std::nullopt;
}

std::string_view scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::TrafficAware: return "traffic-aware";
    case SchemeKind::AlwaysOn: return "always-on";
    case SchemeKind::PeriodicSleepWake: return "periodic";
    case SchemeKind::CoordinatedDutyCycle: return "coordinated";
  }
  return "?";
}

std::optional<SchemeKind> parse_scheme_name(std::string_view name) {
  for (SchemeKind k : {SchemeKind::TrafficAware, SchemeKind::AlwaysOn,
                       SchemeKind::PeriodicSleepWake, SchemeKind::CoordinatedDutyCycle}) {
    if (scheme_name(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string msg = "invalid scenario config:";
  for (const auto& e : errors) msg += "\n  " + e;
  return msg;
}

// Walks a JSON document, recording type errors and unknown keys by path.
class Reader {
public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  bool object(const json& j, const std::string& path,
              std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      errors_.push_back(path + ": expected an object");
      return false;
    }
    std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
      if (!known.contains(key)) errors_.push_back(path + "." + key + ": unknown key");
    }
    return true;
  }

  void number(const json& j, const char* key, const std::string& path, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) {
      errors_.push_back(path + "." + key + ": expected a number");
      return;
    }
    out = j[key].get<double>();
  }

  void integer(const json& j, const char* key, const std::string& path, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) {
      errors_.push_back(path + "." + key + ": expected an integer");
      return;
    }
    out = j[key].get<int>();
  }

  void boolean(const json& j, const char* key, const std::string& path, bool& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) {
      errors_.push_back(path + "." + key + ": expected a boolean");
      return;
    }
    out = j[key].get<bool>();
  }

  bool string(const json& j, const char* key, const std::string& path, std::string& out) {
    if (!j.contains(key)) return false;
    if (!j[key].is_string()) {
      errors_.push_back(path + "." + key + ": expected a string");
      return false;
    }
    out = j[key].get<std::string>();
    return true;
  }

  void node(const json& j, const char* key, const std::string& path, NodeId& out) {
    int v = -1;
    if (!j.contains(key)) {
      errors_.push_back(path + "." + key + ": required");
      return;
    }
    integer(j, key, path, v);
    if (v < 0) {
      errors_.push_back(path + "." + key + ": node id must be >= 0");
      return;
    }
    out = NodeId(static_cast<std::uint32_t>(v));
  }

  void burst(const json& j, const std::string& path, std::optional<BurstSpec>& out) {
    if (!j.contains("burst")) return;
    const std::string p = path + ".burst";
    if (!object(j["burst"], p, {"mean_on_s", "mean_off_s"})) return;
    BurstSpec b;
    number(j["burst"], "mean_on_s", p, b.mean_on_s);
    number(j["burst"], "mean_off_s", p, b.mean_off_s);
    out = b;
  }

private:
  std::vector<std::string>& errors_;
};

void read_document(const json& doc, ScenarioConfig& c, std::vector<std::string>& errors) {
  Reader r(errors);
  if (!r.object(doc, "config",
                {"grid", "nodes", "placements", "initial_energy_j", "energy", "round_s",
                 "slots", "mobility", "traffic", "link", "cache", "scheme", "cluster",
                 "scheduler", "horizon_s", "seed"})) {
    return;
  }
  if (doc.contains("grid") && r.object(doc["grid"], "grid", {"width", "height"})) {
    r.integer(doc["grid"], "width", "grid", c.grid_width);
    r.integer(doc["grid"], "height", "grid", c.grid_height);
  }
  r.integer(doc, "nodes", "config", c.nodes);
  if (doc.contains("placements")) {
    const json& pl = doc["placements"];
    if (!pl.is_array()) {
      errors.push_back("placements: expected an array of [x, y]");
    } else {
      for (std::size_t i = 0; i < pl.size(); ++i) {
        if (!pl[i].is_array() || pl[i].size() != 2 || !pl[i][0].is_number_integer() ||
            !pl[i][1].is_number_integer()) {
          errors.push_back("placements[" + std::to_string(i) + "]: expected [x, y]");
          continue;
        }
        c.placements.push_back({pl[i][0].get<int>(), pl[i][1].get<int>()});
      }
    }
  }
  r.number(doc, "initial_energy_j", "config", c.initial_energy_j);
  if (doc.contains("energy") &&
      r.object(doc["energy"], "energy", {"p_tx", "p_rx", "p_idle", "p_sleep"})) {
    r.number(doc["energy"], "p_tx", "energy", c.energy.p_tx);
    r.number(doc["energy"], "p_rx", "energy", c.energy.p_rx);
    r.number(doc["energy"], "p_idle", "energy", c.energy.p_idle);
    r.number(doc["energy"], "p_sleep", "energy", c.energy.p_sleep);
  }
  r.number(doc, "round_s", "config", c.round_s);
  r.integer(doc, "slots", "config", c.slots);
  if (doc.contains("mobility") && r.object(doc["mobility"], "mobility", {"p_move", "step_s"})) {
    r.number(doc["mobility"], "p_move", "mobility", c.p_move);
    r.number(doc["mobility"], "step_s", "mobility", c.mobility_step_s);
  }
  if (doc.contains("traffic") &&
      r.object(doc["traffic"], "traffic", {"flows", "random_flows", "deadline_rounds"})) {
    const json& t = doc["traffic"];
    r.number(t, "deadline_rounds", "traffic", c.deadline_rounds);
    if (t.contains("flows")) {
      if (!t["flows"].is_array()) {
        errors.push_back("traffic.flows: expected an array");
      } else {
        for (std::size_t i = 0; i < t["flows"].size(); ++i) {
          const json& f = t["flows"][i];
          const std::string p = "traffic.flows[" + std::to_string(i) + "]";
          if (!r.object(f, p, {"src", "dst", "rate_pps", "packet_bits",
                               "delay_sensitive_fraction", "burst"})) {
            continue;
          }
          FlowSpec fs;
          r.node(f, "src", p, fs.src);
          r.node(f, "dst", p, fs.dst);
          r.number(f, "rate_pps", p, fs.rate_pps);
          r.number(f, "packet_bits", p, fs.packet_bits);
          r.number(f, "delay_sensitive_fraction", p, fs.delay_sensitive_fraction);
          r.burst(f, p, fs.burst);
          c.flows.push_back(fs);
        }
      }
    }
    if (t.contains("random_flows") &&
        r.object(t["random_flows"], "traffic.random_flows",
                 {"count", "rate_pps", "packet_bits", "delay_sensitive_fraction", "burst"})) {
      const json& rf = t["random_flows"];
      const std::string p = "traffic.random_flows";
      r.integer(rf, "count", p, c.random_flows.count);
      r.number(rf, "rate_pps", p, c.random_flows.rate_pps);
      r.number(rf, "packet_bits", p, c.random_flows.packet_bits);
      r.number(rf, "delay_sensitive_fraction", p, c.random_flows.delay_sensitive_fraction);
      r.burst(rf, p, c.random_flows.burst);
    }
  }
  if (doc.contains("link") && r.object(doc["link"], "link", {"capacity_bps", "overrides"})) {
    r.number(doc["link"], "capacity_bps", "link", c.link_capacity_bps);
    if (doc["link"].contains("overrides")) {
      const json& ov = doc["link"]["overrides"];
      if (!ov.is_array()) {
        errors.push_back("link.overrides: expected an array");
      } else {
        for (std::size_t i = 0; i < ov.size(); ++i) {
          const std::string p = "link.overrides[" + std::to_string(i) + "]";
          if (!r.object(ov[i], p, {"a", "b", "capacity_bps"})) continue;
          LinkOverride lo;
          r.node(ov[i], "a", p, lo.a);
          r.node(ov[i], "b", p, lo.b);
          r.number(ov[i], "capacity_bps", p, lo.capacity_bps);
          c.link_overrides.push_back(lo);
        }
      }
    }
  }
  if (doc.contains("cache") && r.object(doc["cache"], "cache", {"enabled", "capacity_bits"})) {
    r.boolean(doc["cache"], "enabled", "cache", c.cache_enabled);
    r.number(doc["cache"], "capacity_bits", "cache", c.cache_capacity_bits);
  }
  if (doc.contains("scheme") &&
      r.object(doc["scheme"], "scheme", {"kind", "duty", "period_s", "listen_s", "sleep_s"})) {
    const json& s = doc["scheme"];
    std::string kind;
    if (r.string(s, "kind", "scheme", kind)) {
      if (auto k = parse_scheme_name(kind)) {
        c.scheme.kind = *k;
      } else {
        errors.push_back("scheme.kind: unknown scheme '" + kind + "'");
      }
    }
    r.number(s, "duty", "scheme", c.scheme.duty);
    r.number(s, "period_s", "scheme", c.scheme.period_s);
    r.number(s, "listen_s", "scheme", c.scheme.listen_s);
    r.number(s, "sleep_s", "scheme", c.scheme.sleep_s);
  }
  if (doc.contains("cluster") &&
      r.object(doc["cluster"], "cluster", {"policy", "partitions"})) {
    std::string policy;
    if (r.string(doc["cluster"], "policy", "cluster", policy)) {
      if (policy == "component") {
        c.cluster.kind = ClusterPolicy::Kind::Component;
      } else if (policy == "grid-partition") {
        c.cluster.kind = ClusterPolicy::Kind::GridPartition;
      } else {
        errors.push_back("cluster.policy: expected 'component' or 'grid-partition'");
      }
    }
    r.integer(doc["cluster"], "partitions", "cluster", c.cluster.partitions);
  }
  if (doc.contains("scheduler") &&
      r.object(doc["scheduler"], "scheduler",
               {"epsilon", "capacity_window_s", "observation_window_s",
                "path_delay_window_s", "min_sleep_s"})) {
    const json& s = doc["scheduler"];
    r.number(s, "epsilon", "scheduler", c.epsilon);
    r.number(s, "capacity_window_s", "scheduler", c.capacity_window_s);
    r.number(s, "observation_window_s", "scheduler", c.observation_window_s);
    r.number(s, "path_delay_window_s", "scheduler", c.path_delay_window_s);
    r.number(s, "min_sleep_s", "scheduler", c.min_sleep_s);
  }
  r.number(doc, "horizon_s", "config", c.horizon_s);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      errors.push_back("config.seed: expected a non-negative integer");
    } else if (doc["seed"].get<long long>() < 0) {
      errors.push_back("config.seed: expected a non-negative integer");
    } else {
      c.seed = doc["seed"].get<std::uint64_t>();
    }
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

std::vector<std::string> ScenarioConfig::validate() const {
  std::vector<std::string> e;
  if (grid_width < 1) e.push_back("grid.width must be >= 1");
  if (grid_height < 1) e.push_back("grid.height must be >= 1");
  if (nodes < 1) e.push_back("nodes must be >= 1");
  const int partitions = cluster.kind == ClusterPolicy::Kind::GridPartition
                             ? cluster.partitions * cluster.partitions
                             : 1;
  if (cluster.partitions < 1) e.push_back("cluster.partitions must be >= 1");
  if (nodes > 50 * std::max(1, partitions)) {
    e.push_back("nodes: at most 50 nodes per cluster partition");
  }
  if (!placements.empty()) {
    if (static_cast<int>(placements.size()) != nodes) {
      e.push_back("placements: need exactly one position per node");
    }
    for (std::size_t i = 0; i < placements.size(); ++i) {
      const Position p = placements[i];
      if (p.x < 0 || p.x >= grid_width || p.y < 0 || p.y >= grid_height) {
        e.push_back("placements[" + std::to_string(i) + "]: outside the grid");
      }
    }
  }
  if (!(initial_energy_j > 0.0)) e.push_back("initial_energy_j must be > 0");
  if (!(energy.p_tx >= energy.p_rx && energy.p_rx >= energy.p_idle &&
        energy.p_idle > energy.p_sleep && energy.p_sleep >= 0.0)) {
    e.push_back("energy: need p_tx >= p_rx >= p_idle > p_sleep >= 0");
  }
  if (!(round_s > 0.0)) e.push_back("round_s must be > 0");
  if (slots < 1) e.push_back("slots must be >= 1");
  if (!(p_move >= 0.0 && p_move <= 1.0)) e.push_back("mobility.p_move must be in [0,1]");
  if (!(mobility_step_s > 0.0)) e.push_back("mobility.step_s must be > 0");
  auto check_node = [&](NodeId n, const std::string& field) {
    if (static_cast<int>(n.value) >= nodes) e.push_back(field + ": node does not exist");
  };
  auto check_traffic = [&](double rate, double bits, double frac,
                           const std::optional<BurstSpec>& burst, const std::string& p) {
    if (!(rate >= 0.0)) e.push_back(p + ".rate_pps must be >= 0");
    if (!(bits > 0.0)) e.push_back(p + ".packet_bits must be > 0");
    if (!(frac >= 0.0 && frac <= 1.0)) {
      e.push_back(p + ".delay_sensitive_fraction must be in [0,1]");
    }
    if (burst && (!(burst->mean_on_s > 0.0) || !(burst->mean_off_s >= 0.0))) {
      e.push_back(p + ".burst: need mean_on_s > 0 and mean_off_s >= 0");
    }
  };
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const std::string p = "traffic.flows[" + std::to_string(i) + "]";
    check_node(flows[i].src, p + ".src");
    check_node(flows[i].dst, p + ".dst");
    if (flows[i].src == flows[i].dst) e.push_back(p + ": src and dst must differ");
    check_traffic(flows[i].rate_pps, flows[i].packet_bits,
                  flows[i].delay_sensitive_fraction, flows[i].burst, p);
  }
  if (random_flows.count < 0) e.push_back("traffic.random_flows.count must be >= 0");
  if (random_flows.count > 0 && nodes < 2) {
    e.push_back("traffic.random_flows: need at least 2 nodes");
  }
  check_traffic(random_flows.rate_pps, random_flows.packet_bits,
                random_flows.delay_sensitive_fraction, random_flows.burst,
                "traffic.random_flows");
  if (!(deadline_rounds > 0.0)) e.push_back("traffic.deadline_rounds must be > 0");
  if (!(link_capacity_bps > 0.0)) e.push_back("link.capacity_bps must be > 0");
  for (std::size_t i = 0; i < link_overrides.size(); ++i) {
    const std::string p = "link.overrides[" + std::to_string(i) + "]";
    check_node(link_overrides[i].a, p + ".a");
    check_node(link_overrides[i].b, p + ".b");
    if (!(link_overrides[i].capacity_bps > 0.0)) e.push_back(p + ".capacity_bps must be > 0");
  }
  if (!(cache_capacity_bits >= 0.0)) e.push_back("cache.capacity_bits must be >= 0");
  if (auto msg = scheme.check()) e.push_back(*msg);
  if (!(epsilon > 0.0 && epsilon < 1.0)) e.push_back("scheduler.epsilon must be in (0,1)");
  if (!(capacity_window_s > 0.0)) e.push_back("scheduler.capacity_window_s must be > 0");
  if (!(observation_window_s >= 0.0)) e.push_back("scheduler.observation_window_s must be >= 0");
  if (!(path_delay_window_s >= 0.0)) e.push_back("scheduler.path_delay_window_s must be >= 0");
  if (!(min_sleep_s > 0.0)) e.push_back("scheduler.min_sleep_s must be > 0");
  if (!(horizon_s == 0.0 || horizon_s >= round_s)) {
    e.push_back("horizon_s must be 0 or at least one round");
  }
  return e;
}

ScenarioConfig parse_config_json(const json& doc) {
  ScenarioConfig c;
  std::vector<std::string> errors;
  read_document(doc, c, errors);
  // Fields that failed to parse keep their defaults, so range checks on the
  // rest are still meaningful.
  for (std::string& e : c.validate()) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError({std::string("malformed JSON: ") + err.what()});
  }
  return parse_config_json(doc);
}

nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  using oj = nlohmann::ordered_json;
  auto burst = [](const std::optional<BurstSpec>& b) -> oj {
    if (!b) return nullptr;
    return oj{{"mean_on_s", b->mean_on_s}, {"mean_off_s", b->mean_off_s}};
  };
  oj flows = oj::array();
  for (const FlowSpec& f : c.flows) {
    oj jf{{"src", f.src.value}, {"dst", f.dst.value}, {"rate_pps", f.rate_pps},
          {"packet_bits", f.packet_bits},
          {"delay_sensitive_fraction", f.delay_sensitive_fraction}};
    if (f.burst) jf["burst"] = burst(f.burst);
    flows.push_back(jf);
  }
  oj random{{"count", c.random_flows.count},
            {"rate_pps", c.random_flows.rate_pps},
            {"packet_bits", c.random_flows.packet_bits},
            {"delay_sensitive_fraction", c.random_flows.delay_sensitive_fraction}};
  if (c.random_flows.burst) random["burst"] = burst(c.random_flows.burst);
  oj overrides = oj::array();
  for (const LinkOverride& lo : c.link_overrides) {
    overrides.push_back({{"a", lo.a.value}, {"b", lo.b.value}, {"capacity_bps", lo.capacity_bps}});
  }
  oj placements = oj::array();
  for (Position p : c.placements) placements.push_back({p.x, p.y});

  oj out;
  out["grid"] = {{"width", c.grid_width}, {"height", c.grid_height}};
  out["nodes"] = c.nodes;
  out["placements"] = placements;
  out["initial_energy_j"] = c.initial_energy_j;
  out["energy"] = {{"p_tx", c.energy.p_tx}, {"p_rx", c.energy.p_rx},
                   {"p_idle", c.energy.p_idle}, {"p_sleep", c.energy.p_sleep}};
  out["round_s"] = c.round_s;
  out["slots"] = c.slots;
  out["mobility"] = {{"p_move", c.p_move}, {"step_s", c.mobility_step_s}};
  out["traffic"] = {{"flows", flows}, {"random_flows", random},
                    {"deadline_rounds", c.deadline_rounds}};
  out["link"] = {{"capacity_bps", c.link_capacity_bps}, {"overrides", overrides}};
  out["cache"] = {{"enabled", c.cache_enabled}, {"capacity_bits", c.cache_capacity_bits}};
  out["scheme"] = {{"kind", scheme_name(c.scheme.kind)}, {"duty", c.scheme.duty},
                   {"period_s", c.scheme.period_s}, {"listen_s", c.scheme.listen_s},
                   {"sleep_s", c.scheme.sleep_s}};
  out["cluster"] = {{"policy", c.cluster.kind == ClusterPolicy::Kind::Component
                                   ? "component"
                                   : "grid-partition"},
                    {"partitions", c.cluster.partitions}};
  out["scheduler"] = {{"epsilon", c.epsilon},
                      {"capacity_window_s", c.capacity_window_s},
                      {"observation_window_s", c.observation_window_s},
                      {"path_delay_window_s", c.path_delay_window_s},
                      {"min_sleep_s", c.min_sleep_s}};
  out["horizon_s"] = c.horizon_s;
  if (c.seed) {
    out["seed"] = *c.seed;
  } else {
    out["seed"] = nullptr;
  }
  return out;
}

std::string scenario_fingerprint(const ScenarioConfig& config) {
  auto j = to_json(config);
  j.erase("scheme");
  j.erase("seed");
  const std::string text = j.dump();
  // FNV-1a, then mixed; stable across platforms.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(splitmix64(h)));
  return buf;
}

}  // namespace ecsim
