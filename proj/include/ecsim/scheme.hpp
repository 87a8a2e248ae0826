#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ecsim {

enum class SchemeKind { TrafficAware, AlwaysOn, PeriodicSleepWake, CoordinatedDutyCycle };

/// Sleep-scheduling scheme under test. Parameters not used by `kind` have
/// no effect on the run but must still be in range.
struct Scheme {
  SchemeKind kind = SchemeKind::TrafficAware;
  double duty = 0.25;      // PeriodicSleepWake: awake fraction of each period
  double period_s = 2.0;   // PeriodicSleepWake
  double listen_s = 0.5;   // CoordinatedDutyCycle
  double sleep_s = 1.5;    // CoordinatedDutyCycle

  /// Empty when valid, otherwise a description of the offending field.
  std::optional<std::string> check() const;
};

/// "traffic-aware", "always-on", "periodic", "coordinated".
std::string_view scheme_name(SchemeKind kind);
std::optional<SchemeKind> parse_scheme_name(std::string_view name);

}  // namespace ecsim
