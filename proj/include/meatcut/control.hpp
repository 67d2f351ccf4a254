#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "meatcut/trajectory.hpp"
#include "meatcut/workspace.hpp"

namespace meatcut::control {

struct ControllerConfig {
  double gain = 20.0;                ///< K, 1/s
  double rate = 1000.0;              ///< Hz
  double waypoint_tolerance = 5e-4;  ///< meters
  double waypoint_timeout = 10.0;    ///< seconds per waypoint

  double dt() const { return 1.0 / rate; }
  /// Throws Errc::InvalidArgument unless 0 < K*dt <= 1 and the rest is positive.
  void validate() const;
};

enum class PlantKind { Ideal, Lagged };

struct PlantModel {
  PlantKind kind = PlantKind::Ideal;
  double lag_tau = 0.02;             ///< seconds, first-order velocity lag
  double command_noise_sigma = 0.0;  ///< m/s per axis, Gaussian
  std::uint64_t seed = 0;

  void validate() const;
};

/// Velocity command (x', y', z', phi').
struct Velocity {
  double vx = 0.0, vy = 0.0, vz = 0.0, vphi = 0.0;
};

/// u = K (s_d - s), with the heading error wrapped into (-pi, pi].
Velocity step_controller(const workspace::RobotState& state, const workspace::RobotState& desired,
                         const ControllerConfig& cfg);

struct TrackingReport {
  double mean_error = 0.0;          ///< meters, positional
  double max_error = 0.0;           ///< meters
  double mean_heading_error = 0.0;  ///< radians
  Trajectory executed;              ///< one pose per control tick, t=0 first
  Trajectory reference;             ///< desired pose at each executed tick
  std::vector<std::size_t> reached; ///< executed index at which each waypoint was reached
  std::size_t held_steps = 0;
};

/// Drives the plant through the waypoints in order at cfg.rate, advancing when
/// the position is within the waypoint tolerance. Every step passes through
/// workspace::gate_step. The desired pose at a tick is the closest point on the
/// segment from the previous waypoint to the current target. Starts at the
/// first waypoint unless `start` is given.
///
/// Throws Errc::EmptyInput on an empty plan, Errc::InvalidArgument when a
/// waypoint lies outside `region`, Errc::Stall when a waypoint is not reached
/// within the timeout.
TrackingReport simulate_tracking(const Trajectory& plan, const ControllerConfig& cfg, const PlantModel& plant,
                                 const workspace::SafeRegion& region,
                                 std::optional<workspace::RobotState> start = std::nullopt);

struct ErrorStats {
  double mean = 0.0;
  double max = 0.0;
  double mean_heading = 0.0;
};

/// Mean positional distance between poses with matching timestamps. When the
/// lengths differ, `actual` is linearly resampled at the desired timestamps;
/// timestamps outside its span raise Errc::Alignment.
ErrorStats tracking_error(const Trajectory& desired, const Trajectory& actual);

}  // namespace meatcut::control
