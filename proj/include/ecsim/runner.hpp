#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ecsim/config.hpp"
#include "ecsim/engine.hpp"

namespace ecsim {

/// Sets one parameter given as a dotted path into the config JSON
/// ("scheme.duty", "grid.width") or a short alias ("nodes", "duty", "p_move",
/// "round_s", "horizon_s", "cache", "scheme"). The value text is read as
/// JSON when it parses, otherwise as a string. Throws ConfigError.
ScenarioConfig with_param(const ScenarioConfig& config, const std::string& param,
                          const std::string& value);

/// Threads a batch may use: ECSIM_THREADS when set and positive, otherwise
/// the hardware concurrency.
unsigned thread_limit();

struct Job {
  ScenarioConfig config;
  std::uint64_t seed = 0;
};

/// Runs independent simulations on up to `threads` workers. Results keep
/// the job order. The first failure is rethrown after all workers stop.
std::vector<SimulationResult> run_batch(const std::vector<Job>& jobs, bool keep_trace,
                                        unsigned threads);

/// report.json, timeseries.csv and, when the trace was kept, trace.csv.
void write_run_outputs(const std::filesystem::path& dir, const SimulationResult& result);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Comma-separated list, empty items rejected.
std::vector<std::string> split_list(const std::string& text);
std::vector<std::uint64_t> parse_seeds(const std::string& text);

}  // namespace ecsim
