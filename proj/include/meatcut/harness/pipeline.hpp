#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meatcut/control.hpp"
#include "meatcut/harness/config.hpp"
#include "meatcut/harness/cutting.hpp"
#include "meatcut/harness/scene_gen.hpp"
#include "meatcut/planner.hpp"

namespace meatcut::harness {

/// A plan lifted, clamped and tracked in simulation.
struct CutExecution {
  planner::CutPlan plan;
  planner::LiftedPlan lifted;
  control::TrackingReport tracking;
  /// Knife xy at each plunge bottom as executed, one path per polyline.
  std::vector<Polyline2> cut_paths;
};

CutExecution execute_plan(const planner::CutPlan& plan, const Config& config);

/// Geometry of one product piece. Lengths in cm, areas in cm^2, weights in g.
struct PieceRecord {
  double area_cm2 = 0.0;
  double meat_area_cm2 = 0.0;
  double fat_area_cm2 = 0.0;
  double length_cm = 0.0;  ///< x extent; the thickness of a slice
  double width_cm = 0.0;   ///< y extent
  double weight_g = 0.0;   ///< area * piece height * density
};

PieceRecord describe_piece(const Piece& piece, const MeatSpec& spec);

/// Material removed by one de-fatting cut, judged against ground truth.
struct TrimRecord {
  std::string mode;              ///< "trim" or "point_to_point"
  double fat_removed_cm2 = 0.0;
  double meat_removed_cm2 = 0.0;
  double fat_left_cm2 = 0.0;
  double cut_length_cm = 0.0;    ///< executed cut length inside the piece
  double fat_thickness_removed_cm = 0.0;   ///< fat removed / cut length
  double meat_thickness_removed_cm = 0.0;  ///< meat removed / cut length
  double meat_weight_removed_g = 0.0;
  double fat_weight_removed_g = 0.0;
};

/// Splits `piece` along the executed cut and decides which side to discard:
/// the one holding most of the segmented fat outline, or the smaller one
/// when no fat is visible.
struct DefatCut {
  Piece kept;
  Piece discarded;
  TrimRecord record;
};

DefatCut apply_defat_cut(const Piece& piece, std::span<const Vec2> cut_path,
                         const vision::SceneSegmentation& seg, const MeatSpec& spec, const Config& config,
                         std::string mode);

struct DefatOutcome {
  vision::Scene scene;  ///< the piece alone on the board, as seen before the cut
  vision::SceneSegmentation segmentation;
  std::vector<Vec2> markers;  ///< robot frame, point-to-point only
  CutExecution execution;
  DefatCut cut;
};

/// The ground-truth interface ends of a piece's fat, pushed `push` meters
/// further out along their chord. Nullopt when the fat does not touch meat.
std::optional<std::pair<Vec2, Vec2>> proctor_markers(const Piece& piece, double push);

/// One de-fatting cut on a piece rendered alone. Trim follows the segmented
/// interface; point-to-point cuts straight between the proctor's markers as
/// detected in the rendered scene.
DefatOutcome defat_piece(const Piece& piece, DefatMode mode, const MeatSpec& spec, const Config& config,
                         std::uint64_t render_seed);

/// Straight cut between two operator markers given in pixels; the discard
/// side follows apply_defat_cut.
DefatOutcome point_to_point_cut(const Piece& piece, Vec2 marker_a_px, Vec2 marker_b_px, const MeatSpec& spec,
                                const Config& config, std::uint64_t render_seed);

struct StageRecord {
  std::string stage;  ///< "slice", "defat" or "cube"
  int piece = -1;     ///< input piece index, -1 for the whole meat
  planner::CutPlan plan;
  control::TrackingReport tracking;  ///< executed/reference decimated
};

struct Conservation {
  double meat_parent_cm2 = 0.0;
  double fat_parent_cm2 = 0.0;
  double meat_sum_cm2 = 0.0;  ///< all final pieces, discards included
  double fat_sum_cm2 = 0.0;
  double dropped_cm2 = 0.0;   ///< material in pieces below kEmptyArea
  double meat_rel_error = 0.0;
  double fat_rel_error = 0.0;
};

struct PipelineResult {
  MeatSpec spec;
  vision::Scene initial_scene;
  vision::Scene final_scene;
  std::vector<StageRecord> stages;
  std::vector<Piece> slices;    ///< after slicing, before de-fatting
  std::vector<Piece> cubes;     ///< final product
  std::vector<Piece> discards;  ///< fat trimmings
  std::vector<PieceRecord> slice_records;
  std::vector<PieceRecord> cube_records;
  std::vector<TrimRecord> trims;
  Conservation conservation;
};

/// Slice, de-fat each slice, then cube each kept piece. Every cut is
/// simulated through the controller and applied to the ground truth along
/// its executed path. Stage failures are re-thrown with a "stage:" prefix and
/// the original error code.
PipelineResult run_pipeline(const MeatSpec& spec, const Config& config);

Trajectory decimate(const Trajectory& trajectory, int every);

}  // namespace meatcut::harness
