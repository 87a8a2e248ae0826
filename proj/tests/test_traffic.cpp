#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ecsim/rng.hpp"
#include "ecsim/scheduler.hpp"
#include "ecsim/traffic.hpp"

using namespace ecsim;

namespace {

FlowSpec flow(double rate) {
  FlowSpec f;
  f.src = NodeId(0);
  f.dst = NodeId(1);
  f.rate_pps = rate;
  return f;
}

}  // namespace

TEST(Generate, ZeroRateIsEmpty) {
  Rng rng(1);
  const std::vector<FlowSpec> flows{flow(0.0)};
  EXPECT_TRUE(generate(flows, 1000.0, rng, 20.0).empty());
}

TEST(Generate, PoissonCountWithinThreeSigma) {
  Rng rng(2);
  const std::vector<FlowSpec> flows{flow(2.0)};
  const auto pkts = generate(flows, 1000.0, rng, 20.0);
  EXPECT_NEAR(static_cast<double>(pkts.size()), 2000.0, 3.0 * std::sqrt(2000.0));
}

TEST(Generate, SameSeedSamePackets) {
  const std::vector<FlowSpec> flows{flow(1.0), flow(0.5)};
  Rng a(42), b(42);
  const auto pa = generate(flows, 500.0, a, 20.0);
  const auto pb = generate(flows, 500.0, b, 20.0);
  std::ostringstream sa, sb;
  write_traffic_csv(sa, pa);
  write_traffic_csv(sb, pb);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_FALSE(pa.empty());
}

TEST(Generate, OrderedWithSequentialIdsAndDeadlines) {
  Rng rng(3);
  const std::vector<FlowSpec> flows{flow(1.0), flow(2.0)};
  const auto pkts = generate(flows, 300.0, rng, 20.0);
  for (std::size_t i = 0; i < pkts.size(); ++i) {
    EXPECT_EQ(pkts[i].id, i);
    EXPECT_GE(pkts[i].created_at_s, 0.0);
    EXPECT_LT(pkts[i].created_at_s, 300.0);
    if (i > 0) EXPECT_LE(pkts[i - 1].created_at_s, pkts[i].created_at_s);
    if (pkts[i].cls == PacketClass::DelaySensitive) {
      EXPECT_NEAR(pkts[i].deadline_s, pkts[i].created_at_s + 20.0, 1e-9);
    }
    EXPECT_NO_THROW(pkts[i].validate());
  }
}

TEST(Generate, DelaySensitiveShare) {
  Rng rng(4);
  const std::vector<FlowSpec> flows{flow(5.0)};
  const auto pkts = generate(flows, 1000.0, rng, 20.0);
  double ds = 0.0;
  for (const auto& p : pkts) ds += p.cls == PacketClass::DelaySensitive ? 1.0 : 0.0;
  const double n = static_cast<double>(pkts.size());
  EXPECT_NEAR(ds / n, 0.3, 4.0 * std::sqrt(0.3 * 0.7 / n));
}

TEST(Generate, EqualOnOffHalvesTheLoad) {
  Rng rng(5);
  FlowSpec f = flow(2.0);
  f.burst = BurstSpec{5.0, 5.0};
  const std::vector<FlowSpec> flows{f};
  const auto pkts = generate(flows, 20000.0, rng, 20.0);
  // On/off gating adds variance beyond Poisson; 10% is many standard errors.
  EXPECT_NEAR(static_cast<double>(pkts.size()), 20000.0, 2000.0);
}

TEST(TxDelay, Examples) {
  EXPECT_NEAR(tx_delay(11e6, 11e6), 1.0, 1e-12);
  EXPECT_NEAR(tx_delay(8000.0, 11e6), 8000.0 / 11e6, 1e-15);
  EXPECT_NEAR(tx_delay(8000.0, 11e6), 7.27e-4, 1e-6);
  EXPECT_THROW(tx_delay(8000.0, 0.0), InvalidConfiguration);
}

TEST(Deadline, ElasticNeverFails) {
  Packet p;
  p.size_bits = 8000.0;
  p.cls = PacketClass::Elastic;
  EXPECT_EQ(classify(p), PacketClass::Elastic);
  EXPECT_TRUE(deadline_met(p, 1e9));
}

TEST(Deadline, DelaySensitiveBoundary) {
  Packet p;
  p.size_bits = 8000.0;
  p.cls = PacketClass::DelaySensitive;
  p.created_at_s = 0.0;
  p.deadline_s = 20.0;
  EXPECT_EQ(classify(p), PacketClass::DelaySensitive);
  EXPECT_TRUE(deadline_met(p, 20.0 - 1e-3));
  EXPECT_FALSE(deadline_met(p, 20.0 + 1e-3));
}

TEST(PacketValidate, RejectsBadPackets) {
  Packet p;
  p.size_bits = 0.0;
  EXPECT_THROW(p.validate(), InvalidInput);
  p.size_bits = 1.0;
  p.cls = PacketClass::DelaySensitive;
  p.created_at_s = 5.0;
  p.deadline_s = 5.0;
  EXPECT_THROW(p.validate(), InvalidInput);
}

TEST(EndToEnd, DelayIsSumOfHopComponents) {
  // A packet held twice and sent over three links.
  const double size = 8000.0;
  std::vector<HopDelay> hops{{0.0, tx_delay(size, 11e6)},
                             {2.5, tx_delay(size, 5.5e6)},
                             {0.75, tx_delay(size, 11e6)}};
  double t = 0.0;
  for (const auto& h : hops) t += h.hosting_s + h.transmit_s;
  EXPECT_NEAR(path_delay(hops).total_s, t, 1e-9);
}
