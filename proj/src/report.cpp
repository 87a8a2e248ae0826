#include "ecsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

namespace ecsim {

using nlohmann::ordered_json;

namespace {

std::size_t mode_index(RadioMode m) { return static_cast<std::size_t>(m); }

ordered_json opt(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

Accumulators::Accumulators(const ScenarioConfig& config, std::uint64_t seed)
    : config_(config), seed_(seed) {
  nodes_.resize(static_cast<std::size_t>(config.nodes));
  for (auto& n : nodes_) n.account = EnergyAccount(config.initial_energy_j);
  net_.horizon_s = config.horizon_s;
}

void Accumulators::charge(NodeId n, RadioMode mode, double dur_s) {
  NodeAcc& acc = nodes_.at(n.value);
  acc.account = consume(acc.account, mode, dur_s, config_.energy);
  acc.time_in_mode_s[mode_index(mode)] += dur_s;
  acc.elapsed_s += dur_s;
}

void Accumulators::apply(const TraceRecord& record) {
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, trace::ModeChange>) {
          charge(e.node, e.from, e.dur_s);
        } else if constexpr (std::is_same_v<T, trace::HorizonEnd>) {
          charge(e.node, e.mode, e.dur_s);
        } else if constexpr (std::is_same_v<T, trace::Death>) {
          charge(e.node, e.from, e.dur_s);
          NodeAcc& acc = nodes_.at(e.node.value);
          if (!acc.account.dead()) acc.account = EnergyAccount(0.0, acc.account.capacity());
          acc.death_s = acc.elapsed_s;
        } else if constexpr (std::is_same_v<T, trace::Generated>) {
          ++net_.generated;
          packets_[e.packet] = PacketAcc{e.dst_asleep, false, e.bits};
        } else if constexpr (std::is_same_v<T, trace::Cached>) {
          ++net_.cached;
          packets_[e.packet].sleeping_dst = true;
        } else if constexpr (std::is_same_v<T, trace::Lost>) {
          ++net_.lost;
          if (e.reason == LossReason::SleepingHop || e.reason == LossReason::CacheFull) {
            packets_[e.packet].sleeping_dst = true;
          }
        } else if constexpr (std::is_same_v<T, trace::Delivered>) {
          if (e.on_time) {
            ++net_.delivered;
            net_.delivered_bits += packets_[e.packet].bits;
            delay_sum_s_ += e.delay_s;
            packets_[e.packet].delivered = true;
          } else {
            ++net_.delivered_late;
          }
        } else if constexpr (std::is_same_v<T, trace::RoleAssigned>) {
          NodeAcc& acc = nodes_.at(e.node.value);
          (e.role == Role::ClusterHead ? acc.ch_rounds : acc.sp_rounds) += 1;
        } else if constexpr (std::is_same_v<T, trace::SleepAssigned>) {
          ++net_.sleep_assignments;
        } else if constexpr (std::is_same_v<T, trace::RoundStarted>) {
          net_.alive_fraction.push_back(
              {e.round * config_.round_s, e.alive,
               nodes_.empty() ? 0.0 : static_cast<double>(e.alive) / nodes_.size()});
        }
      },
      record.event);
}

MetricsReport Accumulators::finalize() const {
  MetricsReport r;
  r.scheme = std::string(scheme_name(config_.scheme.kind));
  r.seed = seed_;
  r.fingerprint = scenario_fingerprint(config_);
  r.config = to_json(config_);
  r.config["seed"] = seed_;
  NetworkMetrics net = net_;
  int alive = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const NodeAcc& acc = nodes_[i];
    NodeMetrics m;
    m.id = NodeId(static_cast<std::uint32_t>(i));
    m.consumed_j = acc.account.consumed();
    m.residual_j = acc.account.residual();
    m.remaining_fraction = fraction_remaining(acc.account);
    m.died = acc.death_s.has_value();
    m.lifetime_s = acc.death_s.value_or(config_.horizon_s);
    m.time_in_mode_s = acc.time_in_mode_s;
    m.sp_rounds = acc.sp_rounds;
    m.ch_rounds = acc.ch_rounds;
    net.total_consumption_j += m.consumed_j;
    if (acc.death_s && (!net.first_death_s || *acc.death_s < *net.first_death_s)) {
      net.first_death_s = acc.death_s;
    }
    if (!m.died) ++alive;
    r.nodes.push_back(m);
  }
  const double n = static_cast<double>(nodes_.size());
  net.mean_consumption_j = n > 0 ? net.total_consumption_j / n : 0.0;
  if (config_.horizon_s > 0.0) {
    net.throughput_bps = net.delivered_bits / config_.horizon_s;
    net.mean_power_uw = net.total_consumption_j / config_.horizon_s * 1e6;
  }
  net.delivery_ratio =
      net.generated > 0 ? static_cast<double>(net.delivered) / net.generated : 1.0;
  if (net.delivered > 0) net.mean_delay_s = delay_sum_s_ / net.delivered;
  for (const auto& [id, p] : packets_) {
    if (!p.sleeping_dst) continue;
    ++net.sleeping_dst_packets;
    if (p.delivered) ++net.sleeping_dst_delivered;
  }
  if (net.sleeping_dst_packets > 0) {
    net.sleeping_dst_delivery_ratio =
        static_cast<double>(net.sleeping_dst_delivered) / net.sleeping_dst_packets;
  }
  if (net.alive_fraction.empty() || net.alive_fraction.back().time_s < config_.horizon_s) {
    net.alive_fraction.push_back({config_.horizon_s, alive, n > 0 ? alive / n : 0.0});
  }
  r.network = std::move(net);
  return r;
}

MetricsReport replay(const ScenarioConfig& config, std::uint64_t seed,
                     const std::vector<TraceRecord>& records) {
  Accumulators acc(config, seed);
  for (const auto& rec : records) acc.apply(rec);
  return acc.finalize();
}

ordered_json to_json(const MetricsReport& r) {
  const NetworkMetrics& n = r.network;
  ordered_json alive = ordered_json::array();
  for (const AliveSample& s : n.alive_fraction) {
    alive.push_back({{"time_s", s.time_s}, {"alive", s.alive}, {"fraction", s.fraction}});
  }
  ordered_json network{
      {"horizon_s", n.horizon_s},
      {"generated", n.generated},
      {"delivered", n.delivered},
      {"delivered_late", n.delivered_late},
      {"lost", n.lost},
      {"cached", n.cached},
      {"delivered_bits", n.delivered_bits},
      {"throughput_bps", n.throughput_bps},
      {"delivery_ratio", n.delivery_ratio},
      {"mean_delay_s", opt(n.mean_delay_s)},
      {"total_consumption_j", n.total_consumption_j},
      {"mean_consumption_j", n.mean_consumption_j},
      {"mean_network_power_uw", n.mean_power_uw},
      {"first_death_s", opt(n.first_death_s)},
      {"sleeping_dst_packets", n.sleeping_dst_packets},
      {"sleeping_dst_delivered", n.sleeping_dst_delivered},
      {"sleeping_dst_delivery_ratio", opt(n.sleeping_dst_delivery_ratio)},
      {"sleep_assignments", n.sleep_assignments},
      {"alive_fraction", alive}};
  ordered_json nodes = ordered_json::array();
  for (const NodeMetrics& m : r.nodes) {
    nodes.push_back(
        {{"id", m.id.value},
         {"consumed_j", m.consumed_j},
         {"residual_j", m.residual_j},
         {"remaining_fraction", m.remaining_fraction},
         {"lifetime_s", m.lifetime_s},
         {"died", m.died},
         {"time_in_mode_s",
          {{"tx", m.time_in_mode_s[mode_index(RadioMode::ActiveTx)]},
           {"rx", m.time_in_mode_s[mode_index(RadioMode::ActiveRx)]},
           {"idle", m.time_in_mode_s[mode_index(RadioMode::Idle)]},
           {"sleep", m.time_in_mode_s[mode_index(RadioMode::Sleep)]}}},
         {"sp_rounds", m.sp_rounds},
         {"ch_rounds", m.ch_rounds}});
  }
  return {{"scheme", r.scheme},     {"seed", r.seed},       {"fingerprint", r.fingerprint},
          {"config", r.config},     {"network", network},   {"nodes", nodes}};
}

std::string dump_report(const MetricsReport& report) { return to_json(report).dump(2) + "\n"; }

void write_timeseries_csv(std::ostream& out, const MetricsReport& report) {
  out << "time,alive,alive_fraction\n";
  char buf[96];
  for (const AliveSample& s : report.network.alive_fraction) {
    std::snprintf(buf, sizeof buf, "%.6f,%d,%.6f\n", s.time_s, s.alive, s.fraction);
    out << buf;
  }
}

const std::vector<std::string>& comparison_metrics() {
  static const std::vector<std::string> metrics = {
      "mean_consumption_j", "total_consumption_j", "mean_network_power_uw",
      "delivery_ratio",     "throughput_bps",      "mean_delay_s",
      "first_death_s",      "sleeping_dst_delivery_ratio"};
  return metrics;
}

std::optional<double> metric_value(const MetricsReport& r, const std::string& metric) {
  const NetworkMetrics& n = r.network;
  if (metric == "mean_consumption_j") return n.mean_consumption_j;
  if (metric == "total_consumption_j") return n.total_consumption_j;
  if (metric == "mean_network_power_uw") return n.mean_power_uw;
  if (metric == "delivery_ratio") return n.delivery_ratio;
  if (metric == "throughput_bps") return n.throughput_bps;
  if (metric == "mean_delay_s") return n.mean_delay_s;
  if (metric == "first_death_s") return n.first_death_s;
  if (metric == "sleeping_dst_delivery_ratio") return n.sleeping_dst_delivery_ratio;
  throw InvalidInput("unknown metric '" + metric + "'");
}

Comparison compare(const std::vector<MetricsReport>& reports, const std::string& baseline) {
  if (reports.size() < 2) throw InvalidInput("compare needs at least two reports");
  for (const MetricsReport& r : reports) {
    if (r.fingerprint != reports.front().fingerprint) {
      throw InvalidInput("compare: reports come from different scenarios");
    }
    if (r.seed != reports.front().seed) {
      throw InvalidInput("compare: reports use different seeds");
    }
  }
  Comparison table;
  table.metrics = comparison_metrics();
  for (const MetricsReport& r : reports) table.schemes.push_back(r.scheme);
  table.baseline = baseline.empty() ? reports.front().scheme : baseline;
  auto base = std::find_if(reports.begin(), reports.end(),
                           [&](const MetricsReport& r) { return r.scheme == table.baseline; });
  if (base == reports.end()) {
    throw InvalidInput("compare: baseline '" + table.baseline + "' is not among the reports");
  }
  for (const std::string& metric : table.metrics) {
    const std::optional<double> b = metric_value(*base, metric);
    for (const MetricsReport& r : reports) {
      ComparisonRow row{metric, r.scheme, metric_value(r, metric), std::nullopt};
      if (row.value && b && *b != 0.0) row.delta_pct = (*row.value - *b) / std::abs(*b) * 100.0;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void write_compare_csv(std::ostream& out, const Comparison& table) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return std::string(buf);
  };
  out << "metric";
  for (const auto& s : table.schemes) out << ',' << s;
  for (const auto& s : table.schemes) out << ',' << s << "_delta_pct";
  out << '\n';
  const std::size_t width = table.schemes.size();
  for (std::size_t m = 0; m < table.metrics.size(); ++m) {
    out << table.metrics[m];
    for (std::size_t s = 0; s < width; ++s) out << ',' << cell(table.rows[m * width + s].value);
    for (std::size_t s = 0; s < width; ++s) {
      out << ',' << cell(table.rows[m * width + s].delta_pct);
    }
    out << '\n';
  }
}

std::vector<SeedSummary> summarize_seeds(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw InvalidInput("summarize_seeds: no reports");
  for (const MetricsReport& r : reports) {
    if (r.fingerprint != reports.front().fingerprint || r.scheme != reports.front().scheme) {
      throw InvalidInput("summarize_seeds: reports differ in scenario or scheme");
    }
  }
  std::vector<SeedSummary> out;
  for (const std::string& metric : comparison_metrics()) {
    std::vector<double> xs;
    for (const MetricsReport& r : reports) {
      if (auto v = metric_value(r, metric)) xs.push_back(*v);
    }
    SeedSummary s{metric, xs.size(), std::nullopt, std::nullopt};
    if (!xs.empty()) {
      double sum = 0.0;
      for (double x : xs) sum += x;
      const double mean = sum / xs.size();
      s.mean = mean;
      if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / (xs.size() - 1));
        s.half_width = 1.959963984540054 * sd / std::sqrt(static_cast<double>(xs.size()));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

ordered_json to_json(const std::vector<SeedSummary>& summary) {
  ordered_json out = ordered_json::object();
  for (const SeedSummary& s : summary) {
    out[s.metric] = {{"n", s.n}, {"mean", opt(s.mean)}, {"ci95_half_width", opt(s.half_width)}};
  }
  return out;
}

}  // namespace ecsim
