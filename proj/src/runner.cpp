#include "ecsim/runner.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace ecsim {

namespace {

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> table = {
      {"nodes", "nodes"},
      {"duty", "scheme.duty"},
      {"period_s", "scheme.period_s"},
      {"listen_s", "scheme.listen_s"},
      {"sleep_s", "scheme.sleep_s"},
      {"scheme", "scheme.kind"},
      {"p_move", "mobility.p_move"},
      {"round_s", "round_s"},
      {"slots", "slots"},
      {"horizon_s", "horizon_s"},
      {"cache", "cache.enabled"},
      {"cache_capacity_bits", "cache.capacity_bits"},
      {"initial_energy_j", "initial_energy_j"},
      {"flows", "traffic.random_flows.count"},
      {"rate_pps", "traffic.random_flows.rate_pps"},
      {"capacity_bps", "link.capacity_bps"},
  };
  return table;
}

}  // namespace

ScenarioConfig with_param(const ScenarioConfig& config, const std::string& param,
                          const std::string& value) {
  const auto alias = aliases().find(param);
  const std::string path = alias == aliases().end() ? param : alias->second;
  nlohmann::json doc = nlohmann::json::parse(to_json(config).dump());
  if (doc["seed"].is_null()) doc.erase("seed");
  nlohmann::json* cursor = &doc;
  std::stringstream parts(path);
  std::string part;
  std::vector<std::string> keys;
  while (std::getline(parts, part, '.')) keys.push_back(part);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!cursor->is_object() || (i + 1 < keys.size() && !cursor->contains(keys[i]))) {
      throw ConfigError({"--param " + param + ": no such config field"});
    }
    cursor = &(*cursor)[keys[i]];
  }
  nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
  *cursor = parsed.is_discarded() ? nlohmann::json(value) : parsed;
  return parse_config_json(doc);
}

unsigned thread_limit() {
  if (const char* env = std::getenv("ECSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SimulationResult> run_batch(const std::vector<Job>& jobs, bool keep_trace,
                                        unsigned threads) {
  std::vector<SimulationResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        RunOptions opts;
        opts.keep_trace = keep_trace;
        results[i] = simulate(jobs[i].config, jobs[i].seed, opts);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_run_outputs(const std::filesystem::path& dir, const SimulationResult& result) {
  write_text(dir / "report.json", dump_report(result.report));
  std::ostringstream ts;
  write_timeseries_csv(ts, result.report);
  write_text(dir / "timeseries.csv", ts.str());
  if (!result.trace.empty()) {
    std::ostringstream tr;
    write_trace_csv(tr, result.trace);
    write_text(dir / "trace.csv", tr.str());
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    item = first == std::string::npos ? "" : item.substr(first, last - first + 1);
    if (item.empty()) throw ConfigError({"empty item in list '" + text + "'"});
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError({"empty list"});
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& s : split_list(text)) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
      seeds.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError({"bad seed '" + s + "'"});
    }
  }
  return seeds;
}

}  // namespace ecsim
