// Acceptance gate: one PASS/FAIL line per primary criterion, exit status 1 if
// any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "meatcut/calib.hpp"
#include "meatcut/contact/evaluate.hpp"
#include "meatcut/contact/experiment.hpp"
#include "meatcut/contact/synth.hpp"
#include "meatcut/control.hpp"
#include "meatcut/error.hpp"
#include "meatcut/harness/config.hpp"
#include "meatcut/harness/metrics.hpp"
#include "meatcut/harness/pipeline.hpp"
#include "meatcut/harness/scene_gen.hpp"
#include "meatcut/planner.hpp"
#include "meatcut/squish.hpp"
#include "meatcut/vision.hpp"
#include "meatcut/workspace.hpp"

using namespace meatcut;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Calibration ----------------------------------------------------------------

void calibration_round_trip() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> scale(1e-4, 1.0);
  std::uniform_real_distribution<double> shift(-1.0, 1.0);
  std::uniform_real_distribution<double> pixel(0.0, 1000.0);
  double worst = 0.0;
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double th = angle(rng), s1 = scale(rng), s2 = scale(rng), dx = shift(rng), dy = shift(rng);
    // Generator written out directly: robot = T * camera - offset.
    auto truth = [&](Vec2 c) {
      return Vec2{s1 * std::cos(th) * c.x - s2 * std::sin(th) * c.y - dx,
                  s1 * std::sin(th) * c.x + s2 * std::cos(th) * c.y - dy};
    };
    std::vector<calib::MarkerPair> pairs;
    for (int k = 0; k < 6; ++k) {
      const Vec2 c{pixel(rng), pixel(rng)};
      pairs.push_back({truth(c), c});
    }
    try {
      const calib::CalibrationParams fit = calib::fit_calibration(pairs);
      for (int k = 0; k < 20; ++k) {
        const Vec2 c{pixel(rng), pixel(rng)};
        worst = std::max(worst, distance(calib::pixel_to_robot(fit, c), truth(c)));
      }
      ++solved;
    } catch (const Error& e) {
      std::printf("  calibration trial %d: %s\n", trial, e.what());
    }
  }
  const double t = seconds_since(start);
  report(solved == 100 && worst < 1e-6 && t < 5.0, "calibration round-trip",
         fmt("%d/100 fits, max held-out error %.3g m (< 1e-6), %.2f s (< 5 s)", solved, worst, t));
}

// Safety ---------------------------------------------------------------------

void safety_soundness() {
  const harness::Config config;
  const workspace::SafeRegion& region = config.region;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> wide(-2.0, 2.0);
  std::normal_distribution<double> step(0.0, 0.02);
  std::uniform_real_distribution<double> ux(region.x_min, region.x_max), uy(region.y_min, region.y_max),
      uz(region.z_min, region.z_max);
  std::size_t outside = 0, not_idempotent = 0, moved_inside = 0, states = 0;

  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<Vec3> plan(1 + trial % 20);
    for (Vec3& p : plan) p = {wide(rng), wide(rng), wide(rng)};
    const auto once = workspace::clamp_plan(region, std::span<const Vec3>(plan));
    const auto twice = workspace::clamp_plan(region, std::span<const Vec3>(once));
    for (std::size_t i = 0; i < plan.size(); ++i) {
      outside += !region.contains(once[i]);
      not_idempotent += !(once[i] == twice[i]);
      moved_inside += region.contains(plan[i]) && !(once[i] == plan[i]);
    }
  }
  for (int trial = 0; trial < 10000; ++trial) {
    workspace::RobotState s{ux(rng), uy(rng), uz(rng), 0.0};
    for (int k = 0; k < 50; ++k) {
      const workspace::RobotState proposed{s.x + step(rng), s.y + step(rng), s.z + step(rng), s.phi};
      s = workspace::gate_step(region, s, proposed).state;
      outside += !region.contains(s.position());
      ++states;
    }
  }
  // Closed-loop streams: noisy lagged plants tracking plans that hug the walls.
  control::PlantModel plant{control::PlantKind::Lagged, 0.02, 0.1, 0};
  std::size_t held = 0;
  for (int trial = 0; trial < 100; ++trial) {
    plant.seed = trial;
    Trajectory plan;
    for (int k = 0; k < 3; ++k) {
      const Vec3 p = workspace::clamp_waypoint(region, {wide(rng), wide(rng), wide(rng)});
      plan.push_back({double(k), p.x, p.y, p.z, 0.0});
    }
    const auto rep = control::simulate_tracking(plan, config.controller, plant, region);
    for (const auto& w : rep.executed) outside += !region.contains(w.position());
    states += rep.executed.size();
    held += rep.held_steps;
  }
  report(outside == 0 && not_idempotent == 0 && moved_inside == 0, "safety soundness",
         fmt("10^4 plans + 10^4 gated streams + 100 closed-loop runs (%zu states): %zu outside, %zu "
             "non-idempotent clamps, %zu inside points moved; %zu gate holds",
             states, outside, not_idempotent, moved_inside, held));
}

// Tracking -------------------------------------------------------------------

void tracking_accuracy() {
  const auto start = Clock::now();
  harness::Config config;
  const harness::MeatSpec chop = harness::random_chop(3);
  const harness::Piece piece = harness::build_piece(chop);
  const harness::DefatOutcome trim = harness::defat_piece(piece, harness::DefatMode::Trim, chop, config, 1);
  const std::pair<const char*, planner::CutPlan> motions[] = {
      {"vertical", {planner::Task::Slice, {{{0.55, -0.08}, {0.55, 0.08}}}}},
      {"horizontal", {planner::Task::Cube, {{{0.40, 0.02}, {0.70, 0.02}}}}},
      {"trim", trim.execution.plan},
  };
  // Trials differ by the seed of a small command noise on the default plant.
  config.plant.command_noise_sigma = 0.002;
  double worst_mean = 0.0, worst_max = 0.0;
  std::string detail;
  for (const auto& [name, plan] : motions) {
    double mean = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      config.plant.seed = 1 + trial;
      const auto exec = harness::execute_plan(plan, config);
      mean += exec.tracking.mean_error / 3.0;
      worst_mean = std::max(worst_mean, exec.tracking.mean_error);
      worst_max = std::max(worst_max, exec.tracking.max_error);
    }
    detail += fmt("%s %.3f mm, ", name, 1e3 * mean);
  }
  const double t = seconds_since(start);
  report(worst_mean < 0.0025 && worst_max < 0.005 && t < 30.0, "tracking accuracy",
         detail + fmt("worst trial mean %.3f mm (< 2.5), max %.3f mm (< 5), %.2f s (< 30 s)", 1e3 * worst_mean,
                      1e3 * worst_max, t));
}

// SQUISH-E -------------------------------------------------------------------

double worst_deviation(const Polyline2& pts, const std::vector<std::size_t>& kept) {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
    for (std::size_t j = kept[k] + 1; j < kept[k + 1]; ++j) {
      const double s = double(j - kept[k]) / double(kept[k + 1] - kept[k]);
      const Vec2 a = pts[kept[k]], c = pts[kept[k + 1]];
      worst = std::max(worst, std::hypot(pts[j].x - (a.x + s * (c.x - a.x)), pts[j].y - (a.y + s * (c.y - a.y))));
    }
  }
  return worst;
}

void squish_contract() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> b(0.0, 4.0);
  std::uniform_int_distribution<int> ip(-50, 50);
  int bound_violations = 0, endpoint_violations = 0, monotone_violations = 0, collinear_failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Polyline2 pts{{0.0, 0.0}};
    for (int i = 1; i < 3 + trial % 80; ++i) pts.push_back({pts.back().x + 1.0 + 0.5 * g(rng), pts.back().y + 2.0 * g(rng)});
    const double bound = b(rng);
    const auto kept = planner::squish_e_indices(pts, bound);
    bound_violations += worst_deviation(pts, kept) > bound + 1e-12;
    endpoint_violations += kept.front() != 0 || kept.back() != pts.size() - 1 || kept.size() > pts.size();
    monotone_violations += planner::squish_e_indices(pts, bound + b(rng)).size() > kept.size();

    // Collinear interface pixels at an even pace.
    const Vec2 o{double(ip(rng)), double(ip(rng))};
    Vec2 d{double(ip(rng)), double(ip(rng))};
    if (d == Vec2{}) d = {1.0, 0.0};
    Polyline2 line;
    for (int i = 0; i < 3 + trial % 40; ++i) line.push_back(o + double(i) * d);
    collinear_failures += planner::squish_e_indices(line, 0.0).size() != 2;
  }
  report(bound_violations + endpoint_violations + monotone_violations + collinear_failures == 0, "SQUISH-E contract",
         fmt("1000 random polylines: %d bound violations, %d endpoint/length violations, %d monotonicity "
             "violations; %d collinear inputs not reduced to 2 points",
             bound_violations, endpoint_violations, monotone_violations, collinear_failures));
}

// Segmentation ---------------------------------------------------------------

using vision::Pixel;

std::vector<std::set<Pixel>> flood_fill(const vision::Mask& m) {
  std::vector<std::set<Pixel>> out;
  std::vector<char> seen(std::size_t(m.width()) * m.height(), 0);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y) || seen[std::size_t(y) * m.width() + x]) continue;
      std::set<Pixel> comp;
      std::queue<Pixel> q;
      q.push({x, y});
      seen[std::size_t(y) * m.width() + x] = 1;
      while (!q.empty()) {
        const Pixel p = q.front();
        q.pop();
        comp.insert(p);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx, ny = p.y + dy;
            if (m.get(nx, ny) && !seen[std::size_t(ny) * m.width() + nx]) {
              seen[std::size_t(ny) * m.width() + nx] = 1;
              q.push({nx, ny});
            }
          }
        }
      }
      out.push_back(std::move(comp));
    }
  }
  return out;
}

// Pixels of `comp` with a 4-neighbour in the background reachable from outside.
std::set<Pixel> outer_boundary(const std::set<Pixel>& comp) {
  int x0 = comp.begin()->x, x1 = x0, y0 = comp.begin()->y, y1 = y0;
  for (Pixel p : comp) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const int w = x1 - x0 + 3, h = y1 - y0 + 3;
  std::vector<char> outside(std::size_t(w) * h, 0);
  auto fg = [&](int lx, int ly) { return comp.count({lx + x0 - 1, ly + y0 - 1}) > 0; };
  std::queue<Pixel> q;
  q.push({0, 0});
  outside[0] = 1;
  const Pixel four[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  while (!q.empty()) {
    const Pixel p = q.front();
    q.pop();
    for (Pixel d : four) {
      const int nx = p.x + d.x, ny = p.y + d.y;
      if (nx < 0 || ny < 0 || nx >= w || ny >= h || outside[std::size_t(ny) * w + nx] || fg(nx, ny)) continue;
      outside[std::size_t(ny) * w + nx] = 1;
      q.push({nx, ny});
    }
  }
  std::set<Pixel> out;
  for (Pixel p : comp) {
    for (Pixel d : four) {
      const int lx = p.x - x0 + 1 + d.x, ly = p.y - y0 + 1 + d.y;
      if (outside[std::size_t(ly) * w + lx]) out.insert(p);
    }
  }
  return out;
}

vision::Mask board_mask(const vision::Scene& s, const vision::RgbRange& r) {
  vision::Mask m(s.width, s.height);
  for (int y = s.board.y; y < s.board.y + s.board.height; ++y)
    for (int x = s.board.x; x < s.board.x + s.board.width; ++x)
      if (r.contains(s.at(x, y))) m.set(x, y);
  return m;
}

bool matches_oracle(const vision::Mask& mask, std::size_t area, const vision::Contour& contour) {
  const auto comps = flood_fill(mask);
  std::size_t best = 0;
  for (std::size_t i = 1; i < comps.size(); ++i)
    if (comps[i].size() > comps[best].size()) best = i;
  const std::set<Pixel> traced(contour.begin(), contour.end());
  return comps[best].size() == area && traced == outer_boundary(comps[best]);
}

void segmentation_oracle() {
  harness::Config config;
  config.render.jitter = 8;
  const vision::SegmentationOptions opts = config.segmentation;
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> byte(0, 255);
  int mismatches = 0, variant = 0;
  std::size_t markers_seen = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const harness::MeatSpec spec = trial % 2 ? harness::random_chop(trial) : harness::random_loin(trial);
    const harness::Piece piece = harness::build_piece(spec);
    std::vector<Vec2> markers;
    if (trial % 3 == 0) {
      if (auto m = harness::proctor_markers(piece, 0.01)) markers = {m->first, m->second};
    }
    const vision::Scene scene = harness::render_scene(std::span(&piece, 1), markers, config, trial);
    const vision::SceneSegmentation seg = vision::segment_scene(scene, opts);
    bool ok = matches_oracle(board_mask(scene, opts.colors.meat), seg.meat_area, seg.meat_contour);
    if (seg.fat_contour) ok = ok && matches_oracle(board_mask(scene, opts.colors.fat), seg.fat_area, *seg.fat_contour);
    std::size_t big_markers = 0;
    for (const auto& c : flood_fill(board_mask(scene, opts.colors.marker))) big_markers += c.size() >= opts.marker_min_area;
    ok = ok && big_markers == seg.markers.size();
    markers_seen += seg.markers.size();
    mismatches += !ok;

    vision::Scene noisy = scene;
    for (int y = 0; y < noisy.height; ++y)
      for (int x = 0; x < noisy.width; ++x)
        if (!noisy.board.contains(x, y))
          noisy.at(x, y) = {std::uint8_t(byte(rng)), std::uint8_t(byte(rng)), std::uint8_t(byte(rng))};
    variant += vision::to_json(vision::segment_scene(noisy, opts)) != vision::to_json(seg);
  }
  report(mismatches == 0 && variant == 0, "segmentation oracle equivalence",
         fmt("100 planted scenes (%zu markers): %d area/contour/marker mismatches vs flood fill, %d exterior-"
             "sensitive results",
             markers_seen, mismatches, variant));
}

// Contact --------------------------------------------------------------------

void error_rate_reproduction() {
  struct Row {
    std::uint64_t fp, fn, total;
    double printed;
    bool fraction;
  };
  // The approaching rows print the error as a fraction despite the % sign.
  const Row table[] = {
      {86, 168, 13670, 1.86, false},  {143, 300, 11998, 3.69, false}, {236, 328, 18779, 3.00, false},
      {30, 304, 8123, 4.11, false},   {147, 79, 11948, 1.89, false},  {826, 779, 16769, 9.57, false},
      {802, 1148, 44090, 4.42, false}, {0, 88, 13438, 0.007, true},   {2, 91, 12135, 0.008, true},
      {0, 108, 18924, 0.006, true},   {0, 87, 8123, 0.011, true},     {0, 17, 12135, 0.001, true},
      {0, 133, 16769, 0.008, true},   {5, 305, 44448, 0.007, true},
  };
  int table_misses = 0;
  for (const Row& r : table) {
    const double rate = contact::error_rate(r.fp, r.fn, r.total);
    const double shown = r.fraction ? rate : 100.0 * rate;
    table_misses += std::abs(shown - r.printed) > 0.5 * (r.fraction ? 0.001 : 0.01) + 1e-12;
  }

  const harness::Config config;
  contact::CorpusSpec corpus;
  corpus.seed = config.seed;
  const auto reps = contact::synth_corpus(corpus);
  std::size_t samples = 0;
  for (const auto& r : reps) samples += r.samples.size();

  auto run = [&](contact::SplitKind kind, bool approaching) {
    contact::ExperimentOptions opts;
    opts.split = {kind, config.contact.train_fraction, config.seed};
    opts.forest = {config.contact.n_trees, 5, config.seed, 0};
    opts.mtry_candidates = config.contact.mtry_candidates;
    opts.probe_trees = config.contact.probe_trees;
    opts.approaching = approaching;
    return contact::run_experiment(reps, opts);
  };
  const auto start = Clock::now();
  const auto swt = run(contact::SplitKind::SWT, false);
  const double t = seconds_since(start);
  const auto rwt = run(contact::SplitKind::RWT, false);
  const auto appr = run(contact::SplitKind::SWT, true);
  const double e_swt = swt.pooled.error_rate(), e_rwt = rwt.pooled.error_rate(), e_appr = appr.pooled.error_rate();
  std::string mtry;
  for (const auto& p : swt.parts) mtry += fmt("%s:%d ", p.label.c_str(), p.mtry);
  report(table_misses == 0 && e_swt < 0.03 && e_appr < 0.005 && e_rwt >= e_swt && t < 120.0,
         "error-rate formula and synthetic contact detection",
         fmt("%d/14 published rows off; %zu samples, %d trees: SWT %.2f%% (< 3%%), approaching %.3f%% (< 0.5%%), "
             "RWT %.2f%% (>= SWT), SWT run %.1f s (< 120 s), tuned mtry %s",
             table_misses, samples, config.contact.n_trees, 100 * e_swt, 100 * e_appr, 100 * e_rwt, t,
             mtry.c_str()));
}

// Pipeline -------------------------------------------------------------------

void pipeline_consistency() {
  harness::Config config;
  config.pipeline.n_slices = 4;
  harness::MeatSpec rect;
  rect.outline = harness::Outline::Rectangle;
  rect.semi_x_cm = 12.0;
  rect.semi_y_cm = 4.5;
  const auto r = harness::run_pipeline(rect, config);
  std::vector<double> thickness, weight;
  for (const auto& s : r.slice_records) {
    thickness.push_back(s.length_cm);
    weight.push_back(s.weight_g);
  }
  const double var_t = harness::summarize(thickness).variance, var_w = harness::summarize(weight).variance;

  config = harness::Config{};
  double worst_rel = 0.0;
  std::vector<harness::PieceRecord> slices, cubes;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto loin = harness::run_pipeline(harness::random_loin(seed), config);
    worst_rel = std::max({worst_rel, loin.conservation.meat_rel_error, loin.conservation.fat_rel_error});
    slices.insert(slices.end(), loin.slice_records.begin(), loin.slice_records.end());
    cubes.insert(cubes.end(), loin.cube_records.begin(), loin.cube_records.end());
  }
  const auto rep = harness::consistency_report(std::span<const harness::PieceRecord>(slices),
                                               std::span<const harness::PieceRecord>(cubes), config.pipeline);
  report(r.slice_records.size() == 4 && var_t <= 1e-12 && var_w <= 1e-12 && worst_rel <= 1e-9,
         "pipeline conservation and consistency",
         fmt("rectangle N=4: %zu slices, thickness var %.2g cm^2, weight var %.2g g^2 (<= 1e-12); 4 loins: max "
             "area error %.2g relative (<= 1e-9), %zu slices (mean %.2f cm, %.1f g), %zu cubes (mean %.2f g), "
             "%.1f%% of cubes with both sides in [2.5, 3.5] cm",
             r.slice_records.size(), var_t, var_w, worst_rel, slices.size(), rep.slice_thickness_cm.mean,
             rep.slice_weight_g.mean, cubes.size(), rep.cube_weight_g.mean, 100 * rep.cube_side_fraction));
}

void trim_vs_point_to_point() {
  const harness::Config config;
  int trim_better = 0, scenes = 0;
  double trim_sum = 0.0, p2p_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const harness::MeatSpec spec = harness::random_chop(seed);
    const harness::Piece piece = harness::build_piece(spec);
    const auto trim = harness::defat_piece(piece, harness::DefatMode::Trim, spec, config, seed);
    const auto p2p = harness::defat_piece(piece, harness::DefatMode::PointToPoint, spec, config, seed);
    const double a = trim.cut.record.meat_weight_removed_g, b = p2p.cut.record.meat_weight_removed_g;
    trim_sum += a;
    p2p_sum += b;
    trim_better += a < b;
    ++scenes;
  }
  report(scenes >= 10 && trim_better == scenes, "trim vs scripted point-to-point",
         fmt("trim removed less meat on %d/%d chops; mean meat removed %.2f g (trim) vs %.2f g (point-to-point)",
             trim_better, scenes, trim_sum / scenes, p2p_sum / scenes));
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)()> criteria[] = {
      {"calibration round-trip", calibration_round_trip},
      {"safety soundness", safety_soundness},
      {"tracking accuracy", tracking_accuracy},
      {"SQUISH-E contract", squish_contract},
      {"segmentation oracle equivalence", segmentation_oracle},
      {"error-rate formula and synthetic contact detection", error_rate_reproduction},
      {"pipeline conservation and consistency", pipeline_consistency},
      {"trim vs scripted point-to-point", trim_vs_point_to_point},
  };
  for (const auto& [name, run] : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      report(false, name, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
