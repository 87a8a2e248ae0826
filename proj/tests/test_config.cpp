#include <gtest/gtest.h>

#include <json.hpp>

#include "ecsim/config.hpp"

using namespace ecsim;
using nlohmann::json;

namespace {

std::vector<std::string> errors_of(const json& doc) {
  try {
    parse_config_json(doc);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& what) {
  for (const auto& e : errors) {
    if (e.find(what) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(Config, MinimalFillsDefaults) {
  const ScenarioConfig c = parse_config_json(json::object());
  const ScenarioConfig d;
  EXPECT_EQ(to_json(c), to_json(d));
  EXPECT_EQ(c.nodes, 30);
  EXPECT_EQ(c.scheme.kind, SchemeKind::TrafficAware);
  EXPECT_DOUBLE_EQ(c.link_capacity_bps, 11e6);
  EXPECT_FALSE(c.seed);
}

TEST(Config, RoundTripsThroughJson) {
  json doc = {{"nodes", 12},
              {"grid", {{"width", 4}, {"height", 5}}},
              {"scheme", {{"kind", "periodic"}, {"duty", 0.4}}},
              {"traffic", {{"flows", {{{"src", 0}, {"dst", 3}, {"rate_pps", 1.5}}}}}},
              {"seed", 77}};
  const ScenarioConfig c = parse_config_json(doc);
  EXPECT_EQ(c.nodes, 12);
  EXPECT_EQ(c.scheme.kind, SchemeKind::PeriodicSleepWake);
  ASSERT_EQ(c.flows.size(), 1u);
  EXPECT_EQ(c.flows[0].dst, NodeId(3));
  EXPECT_EQ(*c.seed, 77u);
  const json again = json::parse(to_json(c).dump());
  EXPECT_EQ(to_json(parse_config_json(again)).dump(), to_json(c).dump());
}

TEST(Config, DutyOutOfRangeNamesField) {
  const auto errs = errors_of({{"scheme", {{"kind", "periodic"}, {"duty", 1.5}}}});
  ASSERT_FALSE(errs.empty());
  EXPECT_TRUE(mentions(errs, "scheme.duty"));
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_TRUE(mentions(errors_of({{"bogus", 1}}), "config.bogus"));
  EXPECT_TRUE(mentions(errors_of({{"energy", {{"p_laser", 3.0}}}}), "energy.p_laser"));
}

TEST(Config, EveryErrorReported) {
  const auto errs = errors_of({{"bogus", 1},
                               {"nodes", -3},
                               {"scheme", {{"kind", "periodic"}, {"duty", 1.5}}},
                               {"round_s", "ten"}});
  EXPECT_TRUE(mentions(errs, "bogus"));
  EXPECT_TRUE(mentions(errs, "nodes"));
  EXPECT_TRUE(mentions(errs, "scheme.duty"));
  EXPECT_TRUE(mentions(errs, "round_s"));
}

TEST(Config, RangeChecks) {
  EXPECT_TRUE(mentions(errors_of({{"energy", {{"p_sleep", 2.0}}}}), "energy"));
  EXPECT_TRUE(mentions(errors_of({{"scheme", {{"kind", "sometimes"}}}}), "scheme.kind"));
  EXPECT_TRUE(mentions(errors_of({{"horizon_s", 5.0}}), "horizon_s"));
  EXPECT_TRUE(errors_of({{"horizon_s", 0.0}}).empty());
  EXPECT_FALSE(errors_of({{"nodes", 2}, {"placements", {{0, 0}}}}).empty());
  EXPECT_FALSE(errors_of({{"nodes", 1}, {"placements", {{9, 0}}}}).empty());
  EXPECT_FALSE(errors_of({{"nodes", 2},
                          {"traffic", {{"flows", {{{"src", 0}, {"dst", 5}, {"rate_pps", 1}}}}}}})
                   .empty());
}

TEST(Config, FingerprintIgnoresSchemeAndSeed) {
  ScenarioConfig a;
  ScenarioConfig b = a;
  b.scheme.kind = SchemeKind::AlwaysOn;
  b.seed = 5;
  EXPECT_EQ(scenario_fingerprint(a), scenario_fingerprint(b));
  b.nodes = 31;
  EXPECT_NE(scenario_fingerprint(a), scenario_fingerprint(b));
  EXPECT_EQ(scenario_fingerprint(a).size(), 16u);
}

TEST(Config, SchemeNamesRoundTrip) {
  for (SchemeKind k : {SchemeKind::TrafficAware, SchemeKind::AlwaysOn,
                       SchemeKind::PeriodicSleepWake, SchemeKind::CoordinatedDutyCycle}) {
    EXPECT_EQ(parse_scheme_name(scheme_name(k)), k);
  }
  EXPECT_FALSE(parse_scheme_name("nap"));
}
