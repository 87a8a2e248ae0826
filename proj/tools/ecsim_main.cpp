#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ecsim/config.hpp"
#include "ecsim/engine.hpp"
#include "ecsim/report.hpp"
#include "ecsim/runner.hpp"

namespace fs = std::filesystem;
using namespace ecsim;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string scheme;
  bool trace = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Scenario JSON file")->required();
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_flag("--trace", c.trace, "Also write trace.csv");
  cmd->add_flag("--quiet", c.quiet, "No progress output");
}

ScenarioConfig load(const Common& c) {
  ScenarioConfig cfg = parse_config(c.config);
  if (!c.scheme.empty()) cfg = with_param(cfg, "scheme", "\"" + c.scheme + "\"");
  return cfg;
}

std::vector<std::uint64_t> seeds_of(const Common& c, const ScenarioConfig& cfg) {
  if (!c.seeds.empty()) {
    if (c.seed) throw ConfigError({"give either --seed or --seeds, not both"});
    return parse_seeds(c.seeds);
  }
  if (c.seed) return {*c.seed};
  if (cfg.seed) return {*cfg.seed};
  throw ConfigError({"a seed is required: pass --seed or set \"seed\" in the config"});
}

std::string seed_dir(std::uint64_t s) { return "seed-" + std::to_string(s); }

void say(const Common& c, const std::string& line) {
  if (!c.quiet) std::cout << line << '\n';
}

int cmd_run(const Common& c) {
  const ScenarioConfig cfg = load(c);
  const auto seeds = seeds_of(c, cfg);
  std::vector<Job> jobs;
  for (auto s : seeds) jobs.push_back({cfg, s});
  const auto results = run_batch(jobs, c.trace, thread_limit());
  if (results.size() == 1) {
    write_run_outputs(c.out, results.front());
  } else {
    std::vector<MetricsReport> reports;
    for (std::size_t i = 0; i < results.size(); ++i) {
      write_run_outputs(fs::path(c.out) / seed_dir(seeds[i]), results[i]);
      reports.push_back(results[i].report);
    }
    write_text(fs::path(c.out) / "summary.json", to_json(summarize_seeds(reports)).dump(2) + "\n");
  }
  for (const auto& r : results) {
    char line[160];
    std::snprintf(line, sizeof line,
                  "%s seed=%llu mean_consumption=%.3f J delivery_ratio=%.4f",
                  r.report.scheme.c_str(), static_cast<unsigned long long>(r.report.seed),
                  r.report.network.mean_consumption_j, r.report.network.delivery_ratio);
    say(c, line);
  }
  return 0;
}

int cmd_sweep(const Common& c, const std::string& param, const std::string& values) {
  const ScenarioConfig base = load(c);
  const auto seeds = seeds_of(c, base);
  std::vector<Job> jobs;
  std::vector<std::string> labels;
  const auto items = split_list(values);
  for (const std::string& v : items) {
    const ScenarioConfig cfg = with_param(base, param, v);
    for (auto s : seeds) {
      jobs.push_back({cfg, s});
      labels.push_back(param + "-" + v);
    }
  }
  const auto results = run_batch(jobs, c.trace, thread_limit());
  for (std::size_t v = 0; v < items.size(); ++v) {
    const fs::path dir = fs::path(c.out) / labels[v * seeds.size()];
    std::vector<MetricsReport> reports;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const SimulationResult& r = results[v * seeds.size() + s];
      write_run_outputs(seeds.size() == 1 ? dir : dir / seed_dir(seeds[s]), r);
      reports.push_back(r.report);
    }
    if (seeds.size() > 1) {
      write_text(dir / "summary.json", to_json(summarize_seeds(reports)).dump(2) + "\n");
    }
    say(c, param + "=" + items[v] + ": " + std::to_string(seeds.size()) + " run(s)");
  }
  return 0;
}

int cmd_compare(const Common& c, const std::string& schemes, const std::string& baseline) {
  const ScenarioConfig base = load(c);
  const auto seeds = seeds_of(c, base);
  const auto names = split_list(schemes);
  if (names.size() < 2) throw ConfigError({"--schemes needs at least two schemes"});
  std::vector<Job> jobs;
  for (auto s : seeds) {
    for (const std::string& name : names) {
      jobs.push_back({with_param(base, "scheme", "\"" + name + "\""), s});
    }
  }
  const auto results = run_batch(jobs, c.trace, thread_limit());
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    const fs::path dir = seeds.size() == 1 ? fs::path(c.out) : fs::path(c.out) / seed_dir(seeds[si]);
    std::vector<MetricsReport> reports;
    for (std::size_t k = 0; k < names.size(); ++k) {
      const SimulationResult& r = results[si * names.size() + k];
      write_run_outputs(dir / names[k], r);
      reports.push_back(r.report);
    }
    const Comparison table = compare(reports, baseline);
    std::ostringstream csv;
    write_compare_csv(csv, table);
    write_text(dir / "compare.csv", csv.str());
    say(c, csv.str());
  }
  if (seeds.size() > 1) {
    for (std::size_t k = 0; k < names.size(); ++k) {
      std::vector<MetricsReport> reports;
      for (std::size_t si = 0; si < seeds.size(); ++si) {
        reports.push_back(results[si * names.size() + k].report);
      }
      summary[names[k]] = to_json(summarize_seeds(reports));
    }
    write_text(fs::path(c.out) / "summary.json", summary.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster-based energy-conservation simulator"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "Run one scenario");
  add_common(run, run_opts);
  run->add_option("--seeds", run_opts.seeds, "Comma-separated seeds");
  run->add_option("--scheme", run_opts.scheme, "Override the config's scheme");

  Common sweep_opts;
  std::string param, values;
  auto* sweep = app.add_subcommand("sweep", "Vary one parameter");
  add_common(sweep, sweep_opts);
  sweep->add_option("--seeds", sweep_opts.seeds, "Comma-separated seeds");
  sweep->add_option("--scheme", sweep_opts.scheme, "Override the config's scheme");
  sweep->add_option("--param", param, "Dotted config path or alias")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  Common cmp_opts;
  std::string schemes, baseline;
  auto* cmp = app.add_subcommand("compare", "Run several schemes on one scenario");
  add_common(cmp, cmp_opts);
  cmp->add_option("--seeds", cmp_opts.seeds, "Comma-separated seeds");
  cmp->add_option("--schemes", schemes, "Comma-separated scheme names")->required();
  cmp->add_option("--baseline", baseline, "Scheme the deltas are taken against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts, param, values);
    return cmd_compare(cmp_opts, schemes, baseline);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
