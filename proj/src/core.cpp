#include "ecsim/core.hpp"

#include <algorithm>

namespace ecsim {

std::string to_string(NodeId id) { return std::to_string(id.value); }

std::string_view to_string(RadioMode mode) {
  switch (mode) {
    case RadioMode::ActiveTx: return "ActiveTx";
    case RadioMode::ActiveRx: return "ActiveRx";
    case RadioMode::Idle: return "Idle";
    case RadioMode::Sleep: return "Sleep";
  }
  return "?";
}

void EnergyModelParams::validate() const {
  if (!(p_tx >= p_rx && p_rx >= p_idle && p_idle > p_sleep && p_sleep >= 0.0)) {
    throw InvalidConfiguration(
        "energy params must satisfy p_tx >= p_rx >= p_idle > p_sleep >= 0");
  }
}

double EnergyModelParams::power(RadioMode mode) const {
  switch (mode) {
    case RadioMode::ActiveTx: return p_tx;
    case RadioMode::ActiveRx: return p_rx;
    case RadioMode::Idle: return p_idle;
    case RadioMode::Sleep: return p_sleep;
  }
  return p_idle;
}

EnergyAccount::EnergyAccount(double capacity_j) : EnergyAccount(capacity_j, capacity_j) {}

EnergyAccount::EnergyAccount(double residual_j, double capacity_j)
    : residual_(residual_j), capacity_(capacity_j), dead_(residual_j <= 0.0) {
  if (capacity_j < 0.0 || residual_j < 0.0 || residual_j > capacity_j) {
    throw InvalidInput("energy account requires 0 <= residual <= capacity");
  }
}

EnergyAccount consume(const EnergyAccount& account, RadioMode mode, double duration_s,
                      const EnergyModelParams& params) {
  if (duration_s < 0.0) {
    throw InvalidInput("consume: negative duration");
  }
  EnergyAccount out = account;
  out.residual_ = std::max(0.0, account.residual_ - params.power(mode) * duration_s);
  if (out.residual_ <= 0.0) {
    out.residual_ = 0.0;
    out.dead_ = true;
  }
  return out;
}

double fraction_remaining(const EnergyAccount& account) {
  if (account.capacity() <= 0.0) {
    throw InvalidConfiguration("fraction_remaining: zero capacity");
  }
  return account.residual() / account.capacity();
}

}  // namespace ecsim
