#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecsim/cluster.hpp"
#include "ecsim/core.hpp"
#include "ecsim/scheme.hpp"
#include "ecsim/topology.hpp"
#include "ecsim/traffic.hpp"

namespace ecsim {

/// Every validation problem found in a scenario, not just the first.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

private:
  std::vector<std::string> errors_;
};

struct RandomFlows {
  int count = 0;
  double rate_pps = 0.2;
  double packet_bits = 8000.0;
  double delay_sensitive_fraction = 0.3;
  std::optional<BurstSpec> burst;
};

struct LinkOverride {
  NodeId a;
  NodeId b;
  double capacity_bps = 0.0;
};

struct ScenarioConfig {
  int grid_width = 6;
  int grid_height = 6;
  int nodes = 30;
  std::vector<Position> placements;  // empty: seeded uniform placement

  double initial_energy_j = 1000.0;
  EnergyModelParams energy;

  double round_s = 10.0;
  int slots = 10;

  double p_move = 0.01;
  double mobility_step_s = 1.0;

  std::vector<FlowSpec> flows;
  RandomFlows random_flows;
  double deadline_rounds = 2.0;  // delay-sensitive deadline, in rounds

  double link_capacity_bps = 11e6;
  std::vector<LinkOverride> link_overrides;

  bool cache_enabled = true;
  double cache_capacity_bits = 10e6;

  Scheme scheme;
  ClusterPolicy cluster;

  double epsilon = 1e-6;
  double capacity_window_s = 1.0;
  double observation_window_s = 0.0;   // sup of link capacity; 0 = one round
  double path_delay_window_s = 0.0;    // max path delay; 0 = whole run
  double min_sleep_s = 0.01;           // shorter computed sleeps are skipped

  double horizon_s = 2000.0;
  std::optional<std::uint64_t> seed;

  /// Empty when valid.
  std::vector<std::string> validate() const;
  double deadline_offset_s() const { return deadline_rounds * round_s; }
  double capacity_observation_window() const {
    return observation_window_s > 0.0 ? observation_window_s : round_s;
  }
};

/// Strict parse: unknown keys and out-of-range values are reported
/// together in one ConfigError.
ScenarioConfig parse_config_json(const nlohmann::json& doc);
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Full config with defaults filled, stable key order.
nlohmann::ordered_json to_json(const ScenarioConfig& config);

/// Hash of everything except the scheme and seed, so runs of different
/// schemes on the same scenario can be matched.
std::string scenario_fingerprint(const ScenarioConfig& config);

}  // namespace ecsim
