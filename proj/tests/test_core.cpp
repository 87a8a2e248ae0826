#include <gtest/gtest.h>

#include "ecsim/core.hpp"

using namespace ecsim;

namespace {

EnergyModelParams params() {
  EnergyModelParams p;
  p.p_sleep = 0.1;
  return p;
}

}  // namespace

TEST(Consume, ZeroDurationLeavesResidual) {
  EnergyAccount a(10.0);
  EnergyAccount b = consume(a, RadioMode::Idle, 0.0, params());
  EXPECT_DOUBLE_EQ(b.residual(), 10.0);
  EXPECT_FALSE(b.dead());
}

TEST(Consume, SleepDrawsSleepPower) {
  EnergyAccount b = consume(EnergyAccount(10.0), RadioMode::Sleep, 5.0, params());
  EXPECT_NEAR(b.residual(), 9.5, 1e-9);
}

TEST(Consume, FloorsAtZeroAndLatchesDeath) {
  EnergyAccount a(0.2, 10.0);
  EnergyAccount b = consume(a, RadioMode::ActiveTx, 1.0, params());
  EXPECT_EQ(b.residual(), 0.0);
  EXPECT_TRUE(b.dead());
  // Death stays latched even for a zero-length charge.
  EXPECT_TRUE(consume(b, RadioMode::Sleep, 0.0, params()).dead());
}

TEST(Consume, NegativeDurationRejected) {
  EXPECT_THROW(consume(EnergyAccount(1.0), RadioMode::Idle, -1.0, params()), InvalidInput);
}

TEST(Consume, ResidualNeverIncreases) {
  EnergyAccount a(50.0);
  double prev = a.residual();
  for (int i = 0; i < 200; ++i) {
    const auto mode = static_cast<RadioMode>(i % 4);
    a = consume(a, mode, 0.37 * (i % 5), params());
    EXPECT_LE(a.residual(), prev);
    EXPECT_GE(a.residual(), 0.0);
    EXPECT_NEAR(a.consumed() + a.residual(), 50.0, 1e-9);
    prev = a.residual();
  }
}

TEST(FractionRemaining, Examples) {
  EXPECT_DOUBLE_EQ(fraction_remaining(EnergyAccount(5.0, 10.0)), 0.5);
  EXPECT_DOUBLE_EQ(fraction_remaining(EnergyAccount(10.0, 10.0)), 1.0);
  EXPECT_DOUBLE_EQ(fraction_remaining(EnergyAccount(0.0, 10.0)), 0.0);
  EXPECT_THROW(fraction_remaining(EnergyAccount(0.0, 0.0)), InvalidConfiguration);
}

TEST(EnergyModel, OrderingValidated) {
  EnergyModelParams p;
  EXPECT_NO_THROW(p.validate());
  p.p_rx = 2.0;  // above p_tx
  EXPECT_THROW(p.validate(), InvalidConfiguration);
  p = EnergyModelParams{};
  p.p_sleep = p.p_idle;
  EXPECT_THROW(p.validate(), InvalidConfiguration);
}
