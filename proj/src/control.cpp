#include "meatcut/control.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "meatcut/error.hpp"

namespace meatcut::control {

using workspace::RobotState;

void ControllerConfig::validate() const {
  if (!(rate > 0.0) || !(gain > 0.0) || gain * dt() > 1.0) {
    throw Error(Errc::InvalidArgument, "controller needs 0 < K*dt <= 1");
  }
  if (!(waypoint_tolerance > 0.0) || !(waypoint_timeout > 0.0)) {
    throw Error(Errc::InvalidArgument, "waypoint tolerance and timeout must be positive");
  }
}

void PlantModel::validate() const {
  if (kind == PlantKind::Lagged && !(lag_tau > 0.0)) throw Error(Errc::InvalidArgument, "lag_tau must be positive");
  if (!(command_noise_sigma >= 0.0)) throw Error(Errc::InvalidArgument, "noise sigma must be non-negative");
}

Velocity step_controller(const RobotState& state, const RobotState& desired, const ControllerConfig& cfg) {
  return {cfg.gain * (desired.x - state.x), cfg.gain * (desired.y - state.y), cfg.gain * (desired.z - state.z),
          cfg.gain * wrap_angle(desired.phi - state.phi)};
}

namespace {

RobotState pose(const TimedWaypoint& w) { return {w.x, w.y, w.z, w.phi}; }

TimedWaypoint stamp(double t, const RobotState& s) { return {t, s.x, s.y, s.z, s.phi}; }

}  // namespace

TrackingReport simulate_tracking(const Trajectory& plan, const ControllerConfig& cfg, const PlantModel& plant,
                                 const workspace::SafeRegion& region, std::optional<RobotState> start) {
  cfg.validate();
  plant.validate();
  region.validate();
  if (plan.empty()) throw Error(Errc::EmptyInput, "cannot track an empty plan");
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!region.contains(plan[i].position())) {
      throw Error(Errc::InvalidArgument, "waypoint " + std::to_string(i) + " lies outside the safe region");
    }
  }

  const double dt = cfg.dt();
  const auto max_ticks = static_cast<std::size_t>(std::ceil(cfg.waypoint_timeout * cfg.rate));
  std::mt19937_64 rng(plant.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  RobotState s = start.value_or(pose(plan.front()));
  Velocity v;
  double t = 0.0;
  TrackingReport rep;
  rep.executed.push_back(stamp(t, s));
  rep.reference.push_back(stamp(t, s));

  Vec3 seg_from = s.position();
  for (const TimedWaypoint& w : plan) {
    const RobotState target = pose(w);
    std::size_t ticks = 0;
    while (distance(s.position(), target.position()) > cfg.waypoint_tolerance) {
      if (ticks++ >= max_ticks) {
        throw Error(Errc::Stall, "waypoint " + std::to_string(rep.reached.size()) + " not reached within " +
                                     std::to_string(cfg.waypoint_timeout) + " s");
      }
      Velocity u = step_controller(s, target, cfg);
      if (plant.command_noise_sigma > 0.0) {
        u.vx += plant.command_noise_sigma * noise(rng);
        u.vy += plant.command_noise_sigma * noise(rng);
        u.vz += plant.command_noise_sigma * noise(rng);
      }
      if (plant.kind == PlantKind::Ideal) {
        v = u;
      } else {
        const double a = dt / plant.lag_tau;
        const double blend = std::min(1.0, a);
        v = {v.vx + blend * (u.vx - v.vx), v.vy + blend * (u.vy - v.vy), v.vz + blend * (u.vz - v.vz),
             v.vphi + blend * (u.vphi - v.vphi)};
      }
      const RobotState proposed{s.x + v.vx * dt, s.y + v.vy * dt, s.z + v.vz * dt, wrap_angle(s.phi + v.vphi * dt)};
      const auto decision = workspace::gate_step(region, s, proposed);
      if (decision.action == workspace::GateAction::Hold) {
        ++rep.held_steps;
        v = {};
      }
      s = decision.state;
      t += dt;
      const Vec3 ref = closest_point_on_segment(s.position(), seg_from, target.position());
      rep.executed.push_back(stamp(t, s));
      rep.reference.push_back({t, ref.x, ref.y, ref.z, target.phi});
    }
    rep.reached.push_back(rep.executed.size() - 1);
    seg_from = target.position();
  }

  const ErrorStats e = tracking_error(rep.reference, rep.executed);
  rep.mean_error = e.mean;
  rep.max_error = e.max;
  rep.mean_heading_error = e.mean_heading;
  return rep;
}

namespace {

TimedWaypoint interpolate(const Trajectory& traj, double t) {
  auto it = std::lower_bound(traj.begin(), traj.end(), t,
                             [](const TimedWaypoint& w, double value) { return w.t < value; });
  if (it == traj.end()) throw Error(Errc::Alignment, "timestamp beyond the actual trajectory");
  if (it->t == t) return *it;
  if (it == traj.begin()) throw Error(Errc::Alignment, "timestamp before the actual trajectory");
  const TimedWaypoint& a = *(it - 1);
  const TimedWaypoint& b = *it;
  const double f = (t - a.t) / (b.t - a.t);
  return {t, a.x + f * (b.x - a.x), a.y + f * (b.y - a.y), a.z + f * (b.z - a.z),
          wrap_angle(a.phi + f * wrap_angle(b.phi - a.phi))};
}

}  // namespace

ErrorStats tracking_error(const Trajectory& desired, const Trajectory& actual) {
  if (desired.empty() || actual.empty()) throw Error(Errc::EmptyInput, "tracking error needs two trajectories");
  Trajectory aligned;
  if (actual.size() == desired.size()) {
    aligned = actual;
  } else {
    aligned.reserve(desired.size());
    for (const TimedWaypoint& d : desired) aligned.push_back(interpolate(actual, d.t));
  }
  if (aligned.size() != desired.size()) throw Error(Errc::Alignment, "trajectories differ in length after resampling");

  ErrorStats e;
  for (std::size_t i = 0; i < desired.size(); ++i) {
    const double d = distance(desired[i].position(), aligned[i].position());
    e.mean += d;
    e.max = std::max(e.max, d);
    e.mean_heading += std::abs(wrap_angle(desired[i].phi - aligned[i].phi));
  }
  e.mean /= static_cast<double>(desired.size());
  e.mean_heading /= static_cast<double>(desired.size());
  return e;
}

}  // namespace meatcut::control
