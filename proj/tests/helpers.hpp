#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "ecsim/config.hpp"
#include "ecsim/engine.hpp"
#include "ecsim/trace.hpp"

namespace ecsim::testing {

/// Static three-node line, no traffic unless a test adds some.
inline ScenarioConfig line_scenario() {
  ScenarioConfig c;
  c.grid_width = 4;
  c.grid_height = 1;
  c.nodes = 3;
  c.placements = {{0, 0}, {1, 0}, {2, 0}};
  c.p_move = 0.0;
  c.random_flows.count = 0;
  c.horizon_s = 50.0;
  return c;
}

/// Scaled-down desk scenario: quick to run, still has traffic and movement.
inline ScenarioConfig small_scenario() {
  ScenarioConfig c;
  c.grid_width = 5;
  c.grid_height = 5;
  c.nodes = 15;
  c.random_flows.count = 5;
  c.random_flows.rate_pps = 0.3;
  c.p_move = 0.02;
  c.horizon_s = 300.0;
  return c;
}

inline std::string trace_text(const std::vector<TraceRecord>& records) {
  std::ostringstream out;
  write_trace_csv(out, records);
  return out.str();
}

template <typename T>
std::vector<std::pair<double, T>> rows_of(const std::vector<TraceRecord>& records) {
  std::vector<std::pair<double, T>> out;
  for (const auto& r : records) {
    if (const T* e = std::get_if<T>(&r.event)) out.emplace_back(r.time_s, *e);
  }
  return out;
}

inline bool on_boundary(double t, double period) {
  const double k = std::round(t / period);
  return std::abs(t - k * period) < 1e-9;
}

}  // namespace ecsim::testing
