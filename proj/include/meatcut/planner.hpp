#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "meatcut/calib.hpp"
#include "meatcut/geometry.hpp"
#include "meatcut/squish.hpp"
#include "meatcut/trajectory.hpp"
#include "meatcut/vision.hpp"
#include "meatcut/workspace.hpp"

namespace meatcut::planner {

enum class Task { Slice, PointToPoint, Trim, Cube };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

/// Planar cut polylines in robot coordinates (meters).
struct CutPlan {
  Task task = Task::Slice;
  std::vector<Polyline2> polylines;
};

/// A meat contour mapped into the robot frame. Contour points are pixel
/// centers, so the physical boundary lies up to `pad` further out.
struct MeatOutline {
  Polyline2 ring;
  Vec2 pad;  ///< half a pixel's footprint along x and y, meters
};

MeatOutline outline_in_robot_frame(const vision::Contour& contour, const calib::CalibrationParams& params);

/// Lowest and highest y where the vertical line at `x` meets the outline,
/// padded. Empty when the line misses.
std::optional<std::pair<double, double>> vertical_extent(const MeatOutline& outline, double x);
std::optional<std::pair<double, double>> horizontal_extent(const MeatOutline& outline, double y);

inline constexpr double kSpanMargin = 0.05;

/// N-1 vertical cuts splitting [x_left, x_right] into N equal slices. Each cut
/// spans the outline at that x plus 5% of the span on either end. Throws
/// Errc::InvalidArgument for N < 2 and Errc::InfeasiblePlan when the meat is
/// narrower than N * min_slice_width.
CutPlan plan_slices(const MeatOutline& outline, int n_pieces, double min_slice_width = 0.01);

/// Straight cut from `a` to `b`. Throws Errc::DegenerateCut when they coincide.
CutPlan plan_point_to_point(Vec2 a, Vec2 b);

/// SQUISH-E simplified interface (pixel space, bound in pixels) mapped to the
/// robot frame and extended at both ends by 5% of its length along the end
/// tangents. Throws Errc::InsufficientPoints below two points.
CutPlan plan_trim(std::span<const Vec2> interface_px, double squish_bound_px, const calib::CalibrationParams& params);

/// Square grid: vertical lines at x_min + k*side and horizontal lines at
/// y_min + k*side strictly inside the outline's bounding box, each spanning
/// the outline plus margin. Throws Errc::InfeasiblePlan when the outline is
/// smaller than one cube in both directions.
CutPlan plan_cubes(const MeatOutline& outline, double cube_side);

struct CutMotionProfile {
  double z_travel = 0.10;       ///< meters
  double z_cut_depth = 0.005;   ///< meters above the board
  double period = 2.0;          ///< seconds per plunge
  double pause_spacing = 0.02;  ///< meters between plunges
  double travel_speed = 0.05;   ///< m/s, sets waypoint timestamps between plunges
  int samples_per_period = 8;   ///< even, so one sample hits the bottom

  /// Throws Errc::InvalidArgument when any field is out of range.
  void validate() const;
};

struct LiftedPlan {
  Trajectory waypoints;
  /// For each polyline, the waypoint indices of its plunge bottoms in order.
  std::vector<std::vector<std::size_t>> plunge_bottoms;
};

/// Plunge points along each polyline, including every vertex, at most
/// `spacing` apart.
std::vector<Vec2> plunge_points(std::span<const Vec2> polyline, double spacing);

/// Lifts a planar plan to timed knife poses. At each plunge point the knife
/// arrives at z_travel and then follows one raised-cosine period down to
/// z_cut_depth and back. Heading points at the next plunge point of the same
/// polyline; the last one repeats the previous heading. The result is clamped
/// to `region`. Throws Errc::EmptyInput for an empty plan and
/// Errc::InfeasiblePlan if clamping collapses a polyline to a point.
LiftedPlan lift_to_3d(const CutPlan& plan, const CutMotionProfile& profile, const workspace::SafeRegion& region);

}  // namespace meatcut::planner
