#pragma once

#include <iosfwd>
#include <vector>

#include "meatcut/geometry.hpp"

namespace meatcut {

/// One knife pose with its timestamp: position in meters, heading in radians.
struct TimedWaypoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double phi = 0.0;

  Vec3 position() const { return {x, y, z}; }
  Vec2 planar() const { return {x, y}; }
  friend bool operator==(const TimedWaypoint&, const TimedWaypoint&) = default;
};

using Trajectory = std::vector<TimedWaypoint>;

// Line-oriented text format: one waypoint per line, "t x y z phi".
// Blank lines and lines starting with '#' are skipped on read.
void write_trajectory(std::ostream& out, const Trajectory& trajectory);
Trajectory read_trajectory(std::istream& in);

}  // namespace meatcut
