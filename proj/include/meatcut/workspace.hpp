#pragma once

#include <span>
#include <vector>

#include "meatcut/geometry.hpp"
#include "meatcut/trajectory.hpp"

namespace meatcut::workspace {

/// Axis-aligned box the knife must stay inside. Bounds are inclusive: a
/// point on a face is legal.
struct SafeRegion {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  double z_min = 0.0, z_max = 1.0;

  /// Throws Errc::InvalidArgument unless min < max on every axis.
  void validate() const;
  bool contains(Vec3 p) const;
};

/// Knife pose: position in meters, heading phi in (-pi, pi].
struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double phi = 0.0;

  Vec3 position() const { return {x, y, z}; }
  friend bool operator==(const RobotState&, const RobotState&) = default;
};

Vec3 clamp_waypoint(const SafeRegion& region, Vec3 p);

/// Element-wise clamp; throws Errc::EmptyInput on an empty plan.
std::vector<Vec3> clamp_plan(const SafeRegion& region, std::span<const Vec3> plan);
Trajectory clamp_plan(const SafeRegion& region, std::span<const TimedWaypoint> plan);

enum class GateAction { Execute, Hold };

struct GateDecision {
  GateAction action;
  RobotState state;  ///< proposed state on Execute, current state on Hold
};

/// Execution-time check of a single control step. Only the step endpoint is
/// tested. Throws Errc::SafetyViolation if `current` is already outside.
GateDecision gate_step(const SafeRegion& region, const RobotState& current, const RobotState& proposed);

}  // namespace meatcut::workspace
