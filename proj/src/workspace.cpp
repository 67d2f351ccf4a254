#include "meatcut/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "meatcut/error.hpp"

namespace meatcut::workspace {

void SafeRegion::validate() const {
  auto ok = [](double lo, double hi) { return std::isfinite(lo) && std::isfinite(hi) && lo < hi; };
  if (!ok(x_min, x_max) || !ok(y_min, y_max) || !ok(z_min, z_max)) {
    throw Error(Errc::InvalidArgument, "safe region needs finite min < max on every axis");
  }
}

bool SafeRegion::contains(Vec3 p) const {
  return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max && p.z >= z_min && p.z <= z_max;
}

Vec3 clamp_waypoint(const SafeRegion& region, Vec3 p) {
  return {std::clamp(p.x, region.x_min, region.x_max), std::clamp(p.y, region.y_min, region.y_max),
          std::clamp(p.z, region.z_min, region.z_max)};
}

std::vector<Vec3> clamp_plan(const SafeRegion& region, std::span<const Vec3> plan) {
  if (plan.empty()) throw Error(Errc::EmptyInput, "cannot clamp an empty plan");
  std::vector<Vec3> out;
  out.reserve(plan.size());
  for (const Vec3& p : plan) out.push_back(clamp_waypoint(region, p));
  return out;
}

Trajectory clamp_plan(const SafeRegion& region, std::span<const TimedWaypoint> plan) {
  if (plan.empty()) throw Error(Errc::EmptyInput, "cannot clamp an empty plan");
  Trajectory out(plan.begin(), plan.end());
  for (auto& w : out) {
    const Vec3 c = clamp_waypoint(region, w.position());
    w.x = c.x;
    w.y = c.y;
    w.z = c.z;
  }
  return out;
}

GateDecision gate_step(const SafeRegion& region, const RobotState& current, const RobotState& proposed) {
  if (!region.contains(current.position())) {
    std::ostringstream msg;
    msg << "current state (" << current.x << ", " << current.y << ", " << current.z
        << ") is outside the safe region";
    throw Error(Errc::SafetyViolation, msg.str());
  }
  if (region.contains(proposed.position())) return {GateAction::Execute, proposed};
  return {GateAction::Hold, current};
}

}  // namespace meatcut::workspace
