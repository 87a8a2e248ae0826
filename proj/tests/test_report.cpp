#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ecsim/report.hpp"
#include "helpers.hpp"

using namespace ecsim;
using namespace ecsim::testing;

namespace {

ScenarioConfig two_nodes() {
  ScenarioConfig c;
  c.grid_width = 2;
  c.grid_height = 1;
  c.nodes = 2;
  c.placements = {{0, 0}, {1, 0}};
  c.horizon_s = 10.0;
  c.random_flows.count = 0;
  return c;
}

MetricsReport with_consumption(const std::string& scheme, double mean_j) {
  MetricsReport r;
  r.scheme = scheme;
  r.seed = 1;
  r.fingerprint = "abc";
  r.network.mean_consumption_j = mean_j;
  r.network.delivery_ratio = 0.9;
  return r;
}

}  // namespace

TEST(Finalize, NothingDelivered) {
  Accumulators acc(two_nodes(), 1);
  acc.apply({1.0, trace::Generated{NodeId(0), NodeId(1), 0, 8000.0, PacketClass::Elastic, false}});
  acc.apply({2.0, trace::Lost{NodeId(0), 0, LossReason::SleepingHop}});
  const auto r = acc.finalize();
  EXPECT_EQ(r.network.throughput_bps, 0.0);
  EXPECT_FALSE(r.network.mean_delay_s);
  EXPECT_EQ(r.network.delivery_ratio, 0.0);
  EXPECT_TRUE(to_json(r)["network"]["mean_delay_s"].is_null());
}

TEST(Finalize, AllDelivered) {
  Accumulators acc(two_nodes(), 1);
  for (std::uint64_t p = 0; p < 4; ++p) {
    acc.apply({1.0, trace::Generated{NodeId(0), NodeId(1), p, 8000.0, PacketClass::Elastic, false}});
    acc.apply({1.5, trace::Delivered{NodeId(1), p, 0.5, true, 0.5}});
  }
  const auto r = acc.finalize();
  EXPECT_EQ(r.network.delivery_ratio, 1.0);
  EXPECT_NEAR(*r.network.mean_delay_s, 0.5, 1e-12);
  EXPECT_NEAR(r.network.throughput_bps, 4 * 8000.0 / 10.0, 1e-9);
}

TEST(Finalize, LateDeliveryIsNotDelivered) {
  Accumulators acc(two_nodes(), 1);
  acc.apply({1.0, trace::Generated{NodeId(0), NodeId(1), 0, 8000.0, PacketClass::DelaySensitive, true}});
  acc.apply({30.0, trace::Delivered{NodeId(1), 0, 29.0, false, 29.0}});
  const auto r = acc.finalize();
  EXPECT_EQ(r.network.delivered, 0u);
  EXPECT_EQ(r.network.delivered_late, 1u);
  EXPECT_EQ(r.network.delivery_ratio, 0.0);
  EXPECT_EQ(r.network.sleeping_dst_packets, 1u);
  EXPECT_EQ(*r.network.sleeping_dst_delivery_ratio, 0.0);
}

TEST(Finalize, EnergyFromModeIntervals) {
  const ScenarioConfig c = two_nodes();
  Accumulators acc(c, 1);
  acc.apply({4.0, trace::ModeChange{NodeId(0), RadioMode::Idle, RadioMode::Sleep, 4.0}});
  acc.apply({10.0, trace::HorizonEnd{NodeId(0), RadioMode::Sleep, 6.0}});
  acc.apply({10.0, trace::HorizonEnd{NodeId(1), RadioMode::Idle, 10.0}});
  const auto r = acc.finalize();
  EXPECT_NEAR(r.nodes[0].consumed_j, 4.0 * c.energy.p_idle + 6.0 * c.energy.p_sleep, 1e-12);
  EXPECT_NEAR(r.nodes[1].consumed_j, 10.0 * c.energy.p_idle, 1e-12);
  EXPECT_NEAR(r.network.mean_power_uw,
              (r.nodes[0].consumed_j + r.nodes[1].consumed_j) / 10.0 * 1e6, 1e-3);
  EXPECT_NEAR(r.nodes[0].time_in_mode_s[static_cast<int>(RadioMode::Sleep)], 6.0, 1e-12);
}

TEST(Replay, ReproducesEngineReport) {
  ScenarioConfig c = small_scenario();
  c.initial_energy_j = 80.0;
  const auto res = simulate(c, 6, RunOptions{true, 0});
  std::istringstream in(trace_text(res.trace));
  const auto replayed = replay(c, 6, parse_trace_csv(in));
  EXPECT_EQ(dump_report(replayed), dump_report(res.report));
}

TEST(Report, LedgerCloses) {
  const auto r = run(small_scenario(), 2);
  for (const auto& n : r.nodes) {
    EXPECT_NEAR(n.consumed_j + n.residual_j, 1000.0, 1e-6);
    double modes = 0.0;
    for (double t : n.time_in_mode_s) modes += t;
    EXPECT_NEAR(modes, n.lifetime_s, 1e-6);
  }
}

TEST(Compare, IdenticalReportsHaveZeroDelta) {
  const auto a = with_consumption("periodic", 10.0);
  const auto b = with_consumption("traffic-aware", 10.0);
  const Comparison t = compare({a, b});
  EXPECT_EQ(t.baseline, "periodic");
  EXPECT_EQ(t.rows.size(), comparison_metrics().size() * 2);
  for (const auto& row : t.rows) {
    if (row.delta_pct) {
      EXPECT_EQ(*row.delta_pct, 0.0) << row.metric;
    }
  }
}

TEST(Compare, HeadlineReduction) {
  const Comparison t =
      compare({with_consumption("periodic", 10.0), with_consumption("traffic-aware", 7.4)});
  bool found = false;
  for (const auto& row : t.rows) {
    if (row.metric == "mean_consumption_j" && row.scheme == "traffic-aware") {
      EXPECT_NEAR(*row.delta_pct, -26.0, 1e-9);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Compare, ExplicitBaselineAndCsv) {
  const Comparison t = compare({with_consumption("periodic", 10.0),
                                with_consumption("traffic-aware", 7.4),
                                with_consumption("always-on", 20.0)},
                               "always-on");
  EXPECT_EQ(t.baseline, "always-on");
  std::ostringstream csv;
  write_compare_csv(csv, t);
  const std::string s = csv.str();
  EXPECT_EQ(s.substr(0, s.find('\n')),
            "metric,periodic,traffic-aware,always-on,periodic_delta_pct,"
            "traffic-aware_delta_pct,always-on_delta_pct");
  EXPECT_NE(s.find("mean_consumption_j,10.000000,7.400000,20.000000,-50.000000,-63.000000,"
                   "0.000000"),
            std::string::npos);
}

TEST(Compare, MismatchesRejected) {
  auto a = with_consumption("periodic", 10.0);
  auto b = with_consumption("traffic-aware", 7.4);
  EXPECT_THROW(compare({a}), InvalidInput);
  EXPECT_THROW(compare({a, b}, "coordinated"), InvalidInput);
  b.fingerprint = "other";
  EXPECT_THROW(compare({a, b}), InvalidInput);
  b.fingerprint = a.fingerprint;
  b.seed = 2;
  EXPECT_THROW(compare({a, b}), InvalidInput);
}

TEST(SeedSummary, MeanOfMeansAndInterval) {
  std::vector<MetricsReport> reports;
  for (double v : {2.0, 4.0, 6.0}) reports.push_back(with_consumption("periodic", v));
  for (const auto& s : summarize_seeds(reports)) {
    if (s.metric != "mean_consumption_j") continue;
    EXPECT_EQ(s.n, 3u);
    EXPECT_NEAR(*s.mean, 4.0, 1e-12);
    // Sample sd of {2,4,6} is 2.
    EXPECT_NEAR(*s.half_width, 1.959963984540054 * 2.0 / std::sqrt(3.0), 1e-12);
    return;
  }
  FAIL() << "metric missing";
}

TEST(Timeseries, EndsAtHorizon) {
  const auto r = run(small_scenario(), 1);
  std::ostringstream out;
  write_timeseries_csv(out, r);
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "time,alive,alive_fraction");
  ASSERT_FALSE(r.network.alive_fraction.empty());
  EXPECT_EQ(r.network.alive_fraction.back().time_s, 300.0);
  EXPECT_EQ(r.network.alive_fraction.front().fraction, 1.0);
}
