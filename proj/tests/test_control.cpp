#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "meatcut/control.hpp"
#include "meatcut/error.hpp"

using namespace meatcut;
using namespace meatcut::control;
using workspace::RobotState;
using workspace::SafeRegion;

namespace {

const SafeRegion kRegion{0.29, 0.81, -0.21, 0.21, 0.0, 0.25};

Trajectory line_plan(Vec3 a, Vec3 b) { return {{0.0, a.x, a.y, a.z, 0.0}, {1.0, b.x, b.y, b.z, 0.0}}; }

}  // namespace

TEST_CASE("proportional law examples") {
  ControllerConfig cfg;
  cfg.gain = 1.0;
  const Velocity zero = step_controller({0.1, 0.2, 0.3, 0.4}, {0.1, 0.2, 0.3, 0.4}, cfg);
  CHECK(zero.vx == 0.0);
  CHECK(zero.vphi == 0.0);
  const Velocity unit = step_controller({0, 0, 0, 0}, {1, 0, 0, 0}, cfg);
  CHECK(unit.vx == 1.0);
  CHECK(unit.vy == 0.0);
  CHECK(unit.vz == 0.0);
  const Velocity wrap = step_controller({0, 0, 0, 3.0}, {0, 0, 0, -3.0}, cfg);
  CHECK(wrap.vphi == doctest::Approx(2.0 * std::numbers::pi - 6.0));
  CHECK(wrap.vphi == doctest::Approx(0.283).epsilon(1e-3));
}

TEST_CASE("config validation") {
  ControllerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.gain = 2000.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.gain = 1000.0;
  CHECK_NOTHROW(cfg.validate());
  PlantModel plant{PlantKind::Lagged, 0.0, 0.0, 0};
  CHECK_THROWS_AS(plant.validate(), Error);
}

TEST_CASE("ideal plant error decays by 1 - K dt per step") {
  ControllerConfig cfg;
  cfg.gain = 500.0;  // K dt = 0.5
  cfg.waypoint_tolerance = 1e-6;
  const Vec3 a{0.4, 0.0, 0.1}, b{0.5, 0.05, 0.1};
  const TrackingReport rep = simulate_tracking(line_plan(a, b), cfg, {}, kRegion);
  REQUIRE(rep.reached.size() == 2);
  CHECK(rep.reached[0] == 0);
  const double d0 = distance(a, b);
  for (std::size_t i = 1; i <= rep.reached[1]; ++i) {
    const double d = distance(rep.executed[i].position(), b);
    CHECK(d == doctest::Approx(d0 * std::pow(0.5, double(i))).epsilon(1e-6));
  }
  CHECK(rep.held_steps == 0);
  CHECK(rep.mean_error <= rep.max_error);
}

TEST_CASE("distance to the active waypoint never grows with the ideal plant") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> kdt(0.01, 1.0);
  std::uniform_real_distribution<double> ux(0.3, 0.8), uy(-0.2, 0.2), uz(0.0, 0.25);
  for (int trial = 0; trial < 50; ++trial) {
    ControllerConfig cfg;
    cfg.gain = kdt(rng) * cfg.rate;
    Trajectory plan;
    for (int k = 0; k < 4; ++k) plan.push_back({double(k), ux(rng), uy(rng), uz(rng), 0.0});
    const TrackingReport rep = simulate_tracking(plan, cfg, {}, kRegion);
    std::size_t w = 1;
    for (std::size_t i = 1; i < rep.executed.size(); ++i) {
      const Vec3 target = plan[w].position();
      CHECK(distance(rep.executed[i].position(), target) <= distance(rep.executed[i - 1].position(), target) + 1e-15);
      if (w < rep.reached.size() && i == rep.reached[w]) ++w;
      if (w >= plan.size()) break;
    }
  }
}

TEST_CASE("noisy tracking along the region boundary is held inside") {
  PlantModel plant;
  plant.command_noise_sigma = 0.05;
  std::size_t held = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    plant.seed = seed;
    const Trajectory plan = line_plan({kRegion.x_max, -0.1, 0.0}, {kRegion.x_max, 0.1, kRegion.z_max});
    const TrackingReport rep = simulate_tracking(plan, ControllerConfig{}, plant, kRegion);
    for (const auto& s : rep.executed) CHECK(kRegion.contains(s.position()));
    held += rep.held_steps;
    CHECK(rep.mean_error <= rep.max_error);
    CHECK(rep.executed.size() == rep.reference.size());
  }
  CHECK(held > 0);
}

TEST_CASE("lagged noisy plants stay inside the region for every seed") {
  PlantModel plant{PlantKind::Lagged, 0.02, 0.2, 0};
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ux(0.29, 0.81), uy(-0.21, 0.21), uz(0.0, 0.25);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    plant.seed = seed;
    Trajectory plan;
    for (int k = 0; k < 3; ++k) plan.push_back({double(k), ux(rng), uy(rng), uz(rng), 0.0});
    const TrackingReport rep = simulate_tracking(plan, ControllerConfig{}, plant, kRegion);
    for (const auto& s : rep.executed) CHECK(kRegion.contains(s.position()));
    const TrackingReport again = simulate_tracking(plan, ControllerConfig{}, plant, kRegion);
    CHECK(again.executed == rep.executed);
  }
}

TEST_CASE("tracking errors") {
  const Trajectory plan = line_plan({0.4, 0, 0.1}, {0.5, 0, 0.1});
  CHECK_THROWS_AS(simulate_tracking({}, ControllerConfig{}, {}, kRegion), Error);
  try {
    simulate_tracking(line_plan({0.4, 0, 0.1}, {0.9, 0, 0.1}), ControllerConfig{}, {}, kRegion);
    FAIL("waypoint outside the region accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidArgument);
  }
  ControllerConfig slow;
  slow.gain = 0.01;
  slow.waypoint_timeout = 0.05;
  try {
    simulate_tracking(plan, slow, {}, kRegion);
    FAIL("stalled tracking succeeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Stall);
  }
}

TEST_CASE("tracking_error against direct summation") {
  Trajectory a;
  for (int i = 0; i < 10; ++i) a.push_back({0.1 * i, 0.01 * i, 0.0, 0.1, 0.0});
  CHECK(tracking_error(a, a).mean == 0.0);
  Trajectory shifted = a;
  for (auto& w : shifted) {
    w.x += 0.003;
    w.y -= 0.004;
  }
  CHECK(tracking_error(a, shifted).mean == doctest::Approx(0.005));
  CHECK(tracking_error(a, shifted).max == doctest::Approx(0.005));

  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 0.01);
  for (int trial = 0; trial < 20; ++trial) {
    Trajectory d, s;
    for (int i = 0; i < 50; ++i) {
      d.push_back({0.01 * i, n(rng), n(rng), n(rng), n(rng)});
      s.push_back({0.01 * i, n(rng), n(rng), n(rng), n(rng)});
    }
    double sum = 0.0, heading = 0.0;
    for (int i = 0; i < 50; ++i) {
      sum += std::sqrt(std::pow(d[i].x - s[i].x, 2) + std::pow(d[i].y - s[i].y, 2) + std::pow(d[i].z - s[i].z, 2));
      heading += std::abs(d[i].phi - s[i].phi);
    }
    const ErrorStats e = tracking_error(d, s);
    CHECK(e.mean == doctest::Approx(sum / 50));
    CHECK(e.mean_heading == doctest::Approx(heading / 50));
  }

  // Different lengths: actual resampled at the desired timestamps.
  Trajectory fine;
  for (int i = 0; i <= 90; ++i) fine.push_back({0.01 * i, 0.001 * i, 0.0, 0.1, 0.0});
  CHECK(tracking_error(a, fine).mean == doctest::Approx(0.0).epsilon(1e-12));
  Trajectory shorter(fine.begin(), fine.begin() + 40);
  try {
    tracking_error(a, shorter);
    FAIL("unaligned trajectories accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Alignment);
  }
}
