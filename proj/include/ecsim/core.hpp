#pragma once

#include <cstdint>
#include <compare>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ecsim {

/// Raised for arguments that violate an operation's preconditions.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a configuration value makes a computation meaningless
/// (zero capacity, zero-sized battery, ...).
class InvalidConfiguration : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Stable node identity. Ordered so it can break ties deterministically.
struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

std::string to_string(NodeId id);

enum class RadioMode { ActiveTx, ActiveRx, Idle, Sleep };

std::string_view to_string(RadioMode mode);

/// Power draw per radio mode, in watts.
struct EnergyModelParams {
  double p_tx = 1.4;
  double p_rx = 1.0;
  double p_idle = 0.83;
  double p_sleep = 0.13;

  /// Throws InvalidConfiguration unless p_tx >= p_rx >= p_idle > p_sleep >= 0.
  void validate() const;
  double power(RadioMode mode) const;
};

/// Battery state in joules. Residual energy never grows and never drops
/// below zero; reaching zero latches the account as dead.
class EnergyAccount {
public:
  EnergyAccount() = default;
  /// Full battery of `capacity_j` joules.
  explicit EnergyAccount(double capacity_j);
  EnergyAccount(double residual_j, double capacity_j);

  double residual() const { return residual_; }
  double capacity() const { return capacity_; }
  double consumed() const { return capacity_ - residual_; }
  bool dead() const { return dead_; }

  friend EnergyAccount consume(const EnergyAccount&, RadioMode, double,
                               const EnergyModelParams&);
  friend bool operator==(const EnergyAccount&, const EnergyAccount&) = default;

private:
  double residual_ = 0.0;
  double capacity_ = 0.0;
  bool dead_ = false;
};

/// Charges `duration_s` seconds spent in `mode`. Negative durations are
/// rejected with InvalidInput.
EnergyAccount consume(const EnergyAccount& account, RadioMode mode,
                      double duration_s, const EnergyModelParams& params);

/// residual / capacity; InvalidConfiguration when capacity is zero.
double fraction_remaining(const EnergyAccount& account);

}  // namespace ecsim

template <>
struct std::hash<ecsim::NodeId> {
  std::size_t operator()(ecsim::NodeId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
