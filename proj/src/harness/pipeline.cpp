#include "meatcut/harness/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/LU>

#include "meatcut/calib.hpp"
#include "meatcut/error.hpp"

namespace meatcut::harness {

namespace {

constexpr double kCm = 100.0;
constexpr double kCm2 = 1e4;

// Meters covered by one pixel along its wider axis.
double pixel_size(const Config& config) {
  const Eigen::Matrix2d t = config.camera.params.transform();
  return std::max(t.col(0).norm(), t.col(1).norm());
}

double pixel_area(const Config& config) { return std::abs(config.camera.params.transform().determinant()); }

template <class F>
auto tagged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.what());
  }
}

// Splits every piece along every path, dropping material-free fragments.
std::vector<Piece> cut_all(std::vector<Piece> pieces, const std::vector<Polyline2>& paths, double& dropped) {
  for (const Polyline2& path : paths) {
    const BPolygon region = left_region(path);
    std::vector<Piece> next;
    for (const Piece& p : pieces) {
      Split s = split_piece(p, region);
      for (Piece* part : {&s.left, &s.right}) {
        if (is_empty(*part)) {
          dropped += total_area(*part);
        } else {
          next.push_back(std::move(*part));
        }
      }
    }
    pieces = std::move(next);
  }
  return pieces;
}

void sort_pieces(std::vector<Piece>& pieces) {
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    const Box ba = *bounds(a);
    const Box bb = *bounds(b);
    if (ba.x_min != bb.x_min) return ba.x_min < bb.x_min;
    return ba.y_min < bb.y_min;
  });
}

StageRecord stage_record(std::string stage, int piece, const CutExecution& ex, int decimation) {
  StageRecord r{std::move(stage), piece, ex.plan, ex.tracking};
  r.tracking.executed = decimate(ex.tracking.executed, decimation);
  r.tracking.reference = decimate(ex.tracking.reference, decimation);
  return r;
}

}  // namespace

Trajectory decimate(const Trajectory& trajectory, int every) {
  if (every <= 1 || trajectory.size() <= 2) return trajectory;
  Trajectory out;
  for (std::size_t i = 0; i < trajectory.size(); i += static_cast<std::size_t>(every)) out.push_back(trajectory[i]);
  if (!(out.back() == trajectory.back())) out.push_back(trajectory.back());
  return out;
}

CutExecution execute_plan(const planner::CutPlan& plan, const Config& config) {
  CutExecution ex;
  ex.plan = plan;
  ex.lifted = planner::lift_to_3d(plan, config.motion, config.region);
  ex.tracking = control::simulate_tracking(ex.lifted.waypoints, config.controller, config.plant, config.region);
  for (const auto& bottoms : ex.lifted.plunge_bottoms) {
    Polyline2 path;
    for (std::size_t w : bottoms) path.push_back(ex.tracking.executed.at(ex.tracking.reached.at(w)).planar());
    ex.cut_paths.push_back(std::move(path));
  }
  return ex;
}

PieceRecord describe_piece(const Piece& piece, const MeatSpec& spec) {
  PieceRecord r;
  r.meat_area_cm2 = meat_area(piece) * kCm2;
  r.fat_area_cm2 = fat_area(piece) * kCm2;
  r.area_cm2 = r.meat_area_cm2 + r.fat_area_cm2;
  if (const auto b = bounds(piece)) {
    r.length_cm = b->width() * kCm;
    r.width_cm = b->height() * kCm;
  }
  r.weight_g = r.area_cm2 * spec.thickness_cm * spec.density;
  return r;
}

DefatCut apply_defat_cut(const Piece& piece, std::span<const Vec2> cut_path, const vision::SceneSegmentation& seg,
                         const MeatSpec& spec, const Config& config, std::string mode) {
  const BPolygon region = left_region(cut_path);
  BLine line;
  for (Vec2 p : cut_path) line.push_back({p.x, p.y});

  // Vote with fat outline points clear of the cut.
  const double clearance = 2.0 * pixel_size(config);
  int left = 0;
  int right = 0;
  if (seg.fat_contour) {
    for (vision::Pixel px : *seg.fat_contour) {
      const Vec2 p = calib::pixel_to_robot(config.camera.params, vision::pixel_center(px));
      if (bg::distance(BPoint{p.x, p.y}, line) <= clearance) continue;
      (contains(region, p) ? left : right) += 1;
    }
  }

  Split s = split_piece(piece, region);
  if (left == 0 && right == 0) {
    // No fat to go by: trim off the smaller side.
    (total_area(s.left) <= total_area(s.right) ? left : right) = 1;
  }
  DefatCut out;
  if (left >= right) {
    out.discarded = std::move(s.left);
    out.kept = std::move(s.right);
  } else {
    out.discarded = std::move(s.right);
    out.kept = std::move(s.left);
  }
  TrimRecord& r = out.record;
  r.mode = std::move(mode);
  r.fat_removed_cm2 = fat_area(out.discarded) * kCm2;
  r.meat_removed_cm2 = meat_area(out.discarded) * kCm2;
  r.fat_left_cm2 = fat_area(out.kept) * kCm2;
  r.cut_length_cm = length_inside(cut_path, piece) * kCm;
  if (r.cut_length_cm > 0.0) {
    r.fat_thickness_removed_cm = r.fat_removed_cm2 / r.cut_length_cm;
    r.meat_thickness_removed_cm = r.meat_removed_cm2 / r.cut_length_cm;
  }
  r.meat_weight_removed_g = r.meat_removed_cm2 * spec.thickness_cm * spec.density;
  r.fat_weight_removed_g = r.fat_removed_cm2 * spec.thickness_cm * spec.density;
  return out;
}

std::optional<std::pair<Vec2, Vec2>> proctor_markers(const Piece& piece, double push) {
  std::vector<Vec2> shared;
  for (const BPolygon& poly : piece.fat) {
    for (const BPoint& p : poly.outer()) {
      if (!piece.meat.empty() && bg::distance(p, piece.meat) < 1e-9) shared.push_back({p.x(), p.y()});
    }
  }
  if (shared.size() < 2) return std::nullopt;
  std::pair<Vec2, Vec2> best{shared[0], shared[0]};
  double best_d = -1.0;
  for (std::size_t i = 0; i < shared.size(); ++i) {
    for (std::size_t j = i + 1; j < shared.size(); ++j) {
      const double d = distance(shared[i], shared[j]);
      if (d > best_d) {
        best_d = d;
        best = {shared[i], shared[j]};
      }
    }
  }
  if (best_d <= 0.0) return std::nullopt;
  const Vec2 dir = (1.0 / best_d) * (best.second - best.first);
  return std::pair{best.first - push * dir, best.second + push * dir};
}

DefatOutcome defat_piece(const Piece& piece, DefatMode mode, const MeatSpec& spec, const Config& config,
                         std::uint64_t render_seed) {
  DefatOutcome out;
  const auto& params = config.camera.params;
  planner::CutPlan plan;
  if (mode == DefatMode::Trim) {
    out.scene = render_scene(std::span<const Piece>(&piece, 1), {}, config, render_seed);
    out.segmentation = vision::segment_scene(out.scene, config.segmentation);
    std::vector<Vec2> iface;
    for (vision::Pixel p : vision::fat_meat_interface(out.segmentation, config.pipeline.interface_tol_px)) {
      iface.push_back(vision::pixel_center(p));
    }
    plan = planner::plan_trim(iface, config.pipeline.squish_bound_px, params);
  } else {
    const auto ends = proctor_markers(piece, config.pipeline.marker_push);
    if (!ends) throw Error(Errc::NoInterface, "piece has no fat-meat interface for the proctor");
    const std::vector<Vec2> placed{ends->first, ends->second};
    out.scene = render_scene(std::span<const Piece>(&piece, 1), placed, config, render_seed);
    out.segmentation = vision::segment_scene(out.scene, config.segmentation);
    if (out.segmentation.markers.size() != 2) {
      throw Error(Errc::AmbiguousMarkers, "expected 2 visible markers, found " +
                                              std::to_string(out.segmentation.markers.size()));
    }
    for (Vec2 m : out.segmentation.markers) out.markers.push_back(calib::pixel_to_robot(params, m));
    plan = planner::plan_point_to_point(out.markers[0], out.markers[1]);
  }
  out.execution = execute_plan(plan, config);
  out.cut = apply_defat_cut(piece, out.execution.cut_paths.front(), out.segmentation, spec, config,
                            mode == DefatMode::Trim ? "trim" : "point_to_point");
  return out;
}

DefatOutcome point_to_point_cut(const Piece& piece, Vec2 marker_a_px, Vec2 marker_b_px, const MeatSpec& spec,
                                const Config& config, std::uint64_t render_seed) {
  DefatOutcome out;
  const auto& params = config.camera.params;
  out.scene = render_scene(std::span<const Piece>(&piece, 1), {}, config, render_seed);
  try {
    out.segmentation = vision::segment_scene(out.scene, config.segmentation);
  } catch (const Error& e) {
    if (e.code() != Errc::NoMeat) throw;
  }
  out.markers = {calib::pixel_to_robot(params, marker_a_px), calib::pixel_to_robot(params, marker_b_px)};
  out.execution = execute_plan(planner::plan_point_to_point(out.markers[0], out.markers[1]), config);
  out.cut = apply_defat_cut(piece, out.execution.cut_paths.front(), out.segmentation, spec, config, "point_to_point");
  return out;
}

PipelineResult run_pipeline(const MeatSpec& spec, const Config& config) {
  config.validate();
  PipelineResult res;
  res.spec = spec;
  const int decimation = config.pipeline.trajectory_decimation;
  double dropped = 0.0;

  const GeneratedScene generated = tagged("scene", [&] { return generate_scene(spec, config); });
  res.initial_scene = generated.scene;

  tagged("slice", [&] {
    const auto seg = vision::segment_scene(generated.scene, config.segmentation);
    const auto outline = planner::outline_in_robot_frame(seg.meat_contour, config.camera.params);
    const auto plan = planner::plan_slices(outline, config.pipeline.n_slices, config.pipeline.min_slice_width);
    const CutExecution ex = execute_plan(plan, config);
    res.slices = cut_all({generated.truth}, ex.cut_paths, dropped);
    sort_pieces(res.slices);
    res.stages.push_back(stage_record("slice", -1, ex, decimation));
  });

  std::vector<Piece> kept;
  tagged("defat", [&] {
    const double min_fat = config.pipeline.min_fat_area_px * pixel_area(config);
    for (std::size_t i = 0; i < res.slices.size(); ++i) {
      const Piece& slice = res.slices[i];
      if (fat_area(slice) < min_fat) {
        kept.push_back(slice);
        continue;
      }
      DefatOutcome d = defat_piece(slice, config.pipeline.defat, spec, config, config.seed + 1000 + i);
      res.stages.push_back(stage_record("defat", static_cast<int>(i), d.execution, decimation));
      res.trims.push_back(d.cut.record);
      for (Piece* part : {&d.cut.kept, &d.cut.discarded}) {
        if (is_empty(*part)) dropped += total_area(*part);
      }
      if (!is_empty(d.cut.kept)) kept.push_back(std::move(d.cut.kept));
      if (!is_empty(d.cut.discarded)) res.discards.push_back(std::move(d.cut.discarded));
    }
  });

  tagged("cube", [&] {
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const Piece& piece = kept[i];
      const auto scene = render_scene(std::span<const Piece>(&piece, 1), {}, config, config.seed + 2000 + i);
      const auto seg = vision::segment_scene(scene, config.segmentation);
      const auto outline = planner::outline_in_robot_frame(seg.meat_contour, config.camera.params);
      std::optional<CutExecution> ex;
      try {
        const auto plan = planner::plan_cubes(outline, config.pipeline.cube_side);
        if (!plan.polylines.empty()) ex = execute_plan(plan, config);
      } catch (const Error& e) {
        if (e.code() != Errc::InfeasiblePlan) throw;
      }
      if (!ex) {
        res.cubes.push_back(piece);
        continue;
      }
      std::vector<Piece> cubes = cut_all({piece}, ex->cut_paths, dropped);
      res.stages.push_back(stage_record("cube", static_cast<int>(i), *ex, decimation));
      for (Piece& c : cubes) res.cubes.push_back(std::move(c));
    }
  });
  sort_pieces(res.cubes);

  for (const Piece& s : res.slices) res.slice_records.push_back(describe_piece(s, spec));
  for (const Piece& c : res.cubes) res.cube_records.push_back(describe_piece(c, spec));

  Conservation& c = res.conservation;
  c.meat_parent_cm2 = meat_area(generated.truth) * kCm2;
  c.fat_parent_cm2 = fat_area(generated.truth) * kCm2;
  for (const auto* group : {&res.cubes, &res.discards}) {
    for (const Piece& p : *group) {
      c.meat_sum_cm2 += meat_area(p) * kCm2;
      c.fat_sum_cm2 += fat_area(p) * kCm2;
    }
  }
  c.dropped_cm2 = dropped * kCm2;
  c.meat_rel_error = std::abs(c.meat_sum_cm2 - c.meat_parent_cm2) / c.meat_parent_cm2;
  c.fat_rel_error = c.fat_parent_cm2 > 0.0 ? std::abs(c.fat_sum_cm2 - c.fat_parent_cm2) / c.fat_parent_cm2 : 0.0;

  std::vector<Piece> all = res.cubes;
  all.insert(all.end(), res.discards.begin(), res.discards.end());
  res.final_scene = render_scene(all, {}, config, config.seed + 3000);
  return res;
}

}  // namespace meatcut::harness
