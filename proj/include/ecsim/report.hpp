#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ecsim/config.hpp"
#include "ecsim/core.hpp"
#include "ecsim/trace.hpp"

namespace ecsim {

struct NodeMetrics {
  NodeId id;
  double consumed_j = 0.0;
  double residual_j = 0.0;
  double remaining_fraction = 0.0;
  double lifetime_s = 0.0;  // death time, or the horizon for survivors
  bool died = false;
  std::array<double, 4> time_in_mode_s{};  // indexed by RadioMode
  int sp_rounds = 0;
  int ch_rounds = 0;
};

struct AliveSample {
  double time_s = 0.0;
  int alive = 0;
  double fraction = 0.0;
};

struct NetworkMetrics {
  double horizon_s = 0.0;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;  // on time
  std::uint64_t delivered_late = 0;
  std::uint64_t lost = 0;
  std::uint64_t cached = 0;
  double delivered_bits = 0.0;
  double throughput_bps = 0.0;
  double delivery_ratio = 0.0;
  std::optional<double> mean_delay_s;
  double total_consumption_j = 0.0;
  double mean_consumption_j = 0.0;
  double mean_power_uw = 0.0;  // network total
  std::optional<double> first_death_s;
  /// Packets whose destination slept when they were generated or that met
  /// a sleeping hop on the way.
  std::uint64_t sleeping_dst_packets = 0;
  std::uint64_t sleeping_dst_delivered = 0;
  std::optional<double> sleeping_dst_delivery_ratio;
  std::uint64_t sleep_assignments = 0;
  std::vector<AliveSample> alive_fraction;
};

struct MetricsReport {
  std::string scheme;
  std::uint64_t seed = 0;
  std::string fingerprint;
  nlohmann::ordered_json config;
  std::vector<NodeMetrics> nodes;
  NetworkMetrics network;
};

/// Folds trace records into running totals. The engine charges energy only
/// through this class, so replaying a trace rebuilds the same report.
class Accumulators {
public:
  Accumulators(const ScenarioConfig& config, std::uint64_t seed);

  void apply(const TraceRecord& record);

  const EnergyAccount& account(NodeId n) const { return nodes_.at(n.value).account; }
  /// Seconds accounted for so far (sum of closed intervals).
  double elapsed(NodeId n) const { return nodes_.at(n.value).elapsed_s; }

  /// Used when a run stops early; rates are then taken over `horizon_s`.
  void set_horizon(double horizon_s) {
    config_.horizon_s = horizon_s;
    net_.horizon_s = horizon_s;
  }

  MetricsReport finalize() const;

private:
  struct NodeAcc {
    EnergyAccount account;
    std::array<double, 4> time_in_mode_s{};
    double elapsed_s = 0.0;
    std::optional<double> death_s;
    int sp_rounds = 0;
    int ch_rounds = 0;
  };
  struct PacketAcc {
    bool sleeping_dst = false;
    bool delivered = false;
    double bits = 0.0;
  };

  void charge(NodeId n, RadioMode mode, double dur_s);

  ScenarioConfig config_;
  std::uint64_t seed_;
  std::vector<NodeAcc> nodes_;
  std::map<std::uint64_t, PacketAcc> packets_;
  NetworkMetrics net_;
  double delay_sum_s_ = 0.0;
};

/// Rebuilds the report from a trace of the same (config, seed).
MetricsReport replay(const ScenarioConfig& config, std::uint64_t seed,
                     const std::vector<TraceRecord>& records);

nlohmann::ordered_json to_json(const MetricsReport& report);
/// report.json text, newline terminated.
std::string dump_report(const MetricsReport& report);
/// time,alive,alive_fraction
void write_timeseries_csv(std::ostream& out, const MetricsReport& report);

/// One metric of one scheme, with its change relative to the baseline.
struct ComparisonRow {
  std::string metric;
  std::string scheme;
  std::optional<double> value;
  std::optional<double> delta_pct;  // empty when the baseline value is 0 or missing
};

struct Comparison {
  std::string baseline;
  std::vector<std::string> schemes;
  std::vector<std::string> metrics;
  std::vector<ComparisonRow> rows;  // metric-major
};

/// Metrics compared across schemes, in table order.
const std::vector<std::string>& comparison_metrics();
std::optional<double> metric_value(const MetricsReport& report, const std::string& metric);

/// Table of every comparison metric for every report, with deltas against
/// the report whose scheme is `baseline` (first report when empty). Throws
/// InvalidInput on fewer than two reports, mismatched scenarios or seeds,
/// or an unknown baseline.
Comparison compare(const std::vector<MetricsReport>& reports, const std::string& baseline = "");

/// Wide form: metric,<scheme>...,<scheme>_delta_pct...
void write_compare_csv(std::ostream& out, const Comparison& table);

/// Mean and 95% normal-approximation half-width of each comparison metric
/// over reports of the same scheme and scenario with different seeds.
struct SeedSummary {
  std::string metric;
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> half_width;
};
std::vector<SeedSummary> summarize_seeds(const std::vector<MetricsReport>& reports);
nlohmann::ordered_json to_json(const std::vector<SeedSummary>& summary);

}  // namespace ecsim
