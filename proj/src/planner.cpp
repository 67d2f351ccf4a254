#include "meatcut/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "meatcut/error.hpp"

namespace meatcut::planner {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::Slice: return "slice";
    case Task::PointToPoint: return "point_to_point";
    case Task::Trim: return "trim";
    case Task::Cube: return "cube";
  }
  return "unknown";
}

Task task_from_string(std::string_view name) {
  for (Task t : {Task::Slice, Task::PointToPoint, Task::Trim, Task::Cube}) {
    if (to_string(t) == name) return t;
  }
  throw Error(Errc::InvalidArgument, "unknown task '" + std::string(name) + "'");
}

MeatOutline outline_in_robot_frame(const vision::Contour& contour, const calib::CalibrationParams& params) {
  if (contour.empty()) throw Error(Errc::EmptyInput, "meat contour is empty");
  MeatOutline out;
  out.ring.reserve(contour.size());
  for (vision::Pixel p : contour) out.ring.push_back(calib::pixel_to_robot(params, vision::pixel_center(p)));
  const Eigen::Matrix2d t = params.transform();
  out.pad = {0.5 * (std::abs(t(0, 0)) + std::abs(t(0, 1))), 0.5 * (std::abs(t(1, 0)) + std::abs(t(1, 1)))};
  return out;
}

namespace {

// Crossings of the closed ring with the line {coord(axis) == value}; returns the
// other coordinate's range.
std::optional<std::pair<double, double>> ring_extent(const Polyline2& ring, double value, bool vertical) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto along = [&](Vec2 p) { return vertical ? p.x : p.y; };
  auto across = [&](Vec2 p) { return vertical ? p.y : p.x; };
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[(i + 1) % n];
    const double ua = along(a), ub = along(b);
    if (value < std::min(ua, ub) || value > std::max(ua, ub)) continue;
    if (ua == ub) {
      lo = std::min({lo, across(a), across(b)});
      hi = std::max({hi, across(a), across(b)});
      continue;
    }
    const double t = (value - ua) / (ub - ua);
    const double v = across(a) + t * (across(b) - across(a));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo > hi) return std::nullopt;
  return std::pair{lo, hi};
}

struct Bounds {
  double x_min, x_max, y_min, y_max;
};

Bounds padded_bounds(const MeatOutline& outline) {
  if (outline.ring.empty()) throw Error(Errc::EmptyInput, "meat outline is empty");
  Bounds b{outline.ring[0].x, outline.ring[0].x, outline.ring[0].y, outline.ring[0].y};
  for (Vec2 p : outline.ring) {
    b.x_min = std::min(b.x_min, p.x);
    b.x_max = std::max(b.x_max, p.x);
    b.y_min = std::min(b.y_min, p.y);
    b.y_max = std::max(b.y_max, p.y);
  }
  b.x_min -= outline.pad.x;
  b.x_max += outline.pad.x;
  b.y_min -= outline.pad.y;
  b.y_max += outline.pad.y;
  return b;
}

std::pair<double, double> with_margin(std::pair<double, double> span) {
  const double m = kSpanMargin * (span.second - span.first);
  return {span.first - m, span.second + m};
}

Polyline2 vertical_cut(const MeatOutline& outline, double x) {
  const auto ext = vertical_extent(outline, x);
  if (!ext) throw Error(Errc::InfeasiblePlan, "cut line at x=" + std::to_string(x) + " misses the meat");
  const auto [lo, hi] = with_margin(*ext);
  return {{x, lo}, {x, hi}};
}

Polyline2 horizontal_cut(const MeatOutline& outline, double y) {
  const auto ext = horizontal_extent(outline, y);
  if (!ext) throw Error(Errc::InfeasiblePlan, "cut line at y=" + std::to_string(y) + " misses the meat");
  const auto [lo, hi] = with_margin(*ext);
  return {{lo, y}, {hi, y}};
}

}  // namespace

std::optional<std::pair<double, double>> vertical_extent(const MeatOutline& outline, double x) {
  auto e = ring_extent(outline.ring, x, true);
  if (e) *e = {e->first - outline.pad.y, e->second + outline.pad.y};
  return e;
}

std::optional<std::pair<double, double>> horizontal_extent(const MeatOutline& outline, double y) {
  auto e = ring_extent(outline.ring, y, false);
  if (e) *e = {e->first - outline.pad.x, e->second + outline.pad.x};
  return e;
}

CutPlan plan_slices(const MeatOutline& outline, int n_pieces, double min_slice_width) {
  if (n_pieces < 2) throw Error(Errc::InvalidArgument, "slicing needs at least 2 pieces");
  if (!(min_slice_width > 0.0)) throw Error(Errc::InvalidArgument, "minimum slice width must be positive");
  const Bounds b = padded_bounds(outline);
  const double width = b.x_max - b.x_min;
  if (width < n_pieces * min_slice_width) {
    throw Error(Errc::InfeasiblePlan, "meat is " + std::to_string(width) + " m wide, too narrow for " +
                                          std::to_string(n_pieces) + " slices");
  }
  CutPlan plan{Task::Slice, {}};
  for (int k = 1; k < n_pieces; ++k) {
    plan.polylines.push_back(vertical_cut(outline, b.x_min + k * width / n_pieces));
  }
  return plan;
}

CutPlan plan_point_to_point(Vec2 a, Vec2 b) {
  if (a == b) throw Error(Errc::DegenerateCut, "point-to-point markers coincide");
  return {Task::PointToPoint, {{a, b}}};
}

CutPlan plan_trim(std::span<const Vec2> interface_px, double squish_bound_px, const calib::CalibrationParams& params) {
  if (interface_px.size() < 2) throw Error(Errc::InsufficientPoints, "trim needs at least 2 interface points");
  Polyline2 path;
  for (Vec2 p : squish_e(interface_px, squish_bound_px)) path.push_back(calib::pixel_to_robot(params, p));
  const double extension = kSpanMargin * polyline_length(path);
  auto extend = [&](Vec2 end, Vec2 inner) {
    const Vec2 d = end - inner;
    const double len = norm(d);
    return len > 0.0 ? end + (extension / len) * d : end;
  };
  path.front() = extend(path[0], path[1]);
  path.back() = extend(path[path.size() - 1], path[path.size() - 2]);
  return {Task::Trim, {path}};
}

CutPlan plan_cubes(const MeatOutline& outline, double cube_side) {
  if (!(cube_side > 0.0)) throw Error(Errc::InvalidArgument, "cube side must be positive");
  const Bounds b = padded_bounds(outline);
  if (std::max(b.x_max - b.x_min, b.y_max - b.y_min) < cube_side) {
    throw Error(Errc::InfeasiblePlan, "meat is smaller than one cube");
  }
  // Lines closer than this to the far edge would shave a sliver, not a cube row.
  const double eps = 1e-9;
  CutPlan plan{Task::Cube, {}};
  for (int k = 1; b.x_min + k * cube_side < b.x_max - eps; ++k) {
    plan.polylines.push_back(vertical_cut(outline, b.x_min + k * cube_side));
  }
  for (int k = 1; b.y_min + k * cube_side < b.y_max - eps; ++k) {
    plan.polylines.push_back(horizontal_cut(outline, b.y_min + k * cube_side));
  }
  return plan;
}

void CutMotionProfile::validate() const {
  auto bad = [](const char* what) { throw Error(Errc::InvalidArgument, std::string("motion profile: ") + what); };
  if (!(z_travel > z_cut_depth)) bad("z_travel must exceed z_cut_depth");
  if (!(period > 0.0)) bad("period must be positive");
  if (!(pause_spacing > 0.0)) bad("pause_spacing must be positive");
  if (!(travel_speed > 0.0)) bad("travel_speed must be positive");
  if (samples_per_period < 2 || samples_per_period % 2 != 0) bad("samples_per_period must be even and >= 2");
}

std::vector<Vec2> plunge_points(std::span<const Vec2> polyline, double spacing) {
  if (polyline.empty()) return {};
  if (!(spacing > 0.0)) throw Error(Errc::InvalidArgument, "plunge spacing must be positive");
  std::vector<Vec2> out{polyline[0]};
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Vec2 a = polyline[i - 1];
    const Vec2 b = polyline[i];
    const double len = distance(a, b);
    if (len == 0.0) continue;
    const int m = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
    for (int k = 1; k <= m; ++k) out.push_back(k == m ? b : a + (static_cast<double>(k) / m) * (b - a));
  }
  return out;
}

LiftedPlan lift_to_3d(const CutPlan& plan, const CutMotionProfile& profile, const workspace::SafeRegion& region) {
  profile.validate();
  region.validate();
  if (plan.polylines.empty()) throw Error(Errc::EmptyInput, "cannot lift an empty plan");

  const int s = profile.samples_per_period;
  const double amplitude = profile.z_travel - profile.z_cut_depth;
  const double sample_dt = profile.period / s;
  constexpr double kMinTravelTime = 0.1;

  LiftedPlan out;
  double t = 0.0;
  std::optional<Vec3> last;
  for (const Polyline2& raw : plan.polylines) {
    if (raw.size() < 2) throw Error(Errc::InvalidArgument, "cut polylines need at least 2 points");
    Polyline2 line;
    for (Vec2 p : raw) {
      const Vec3 c = workspace::clamp_waypoint(region, {p.x, p.y, region.z_min});
      line.push_back({c.x, c.y});
    }
    if (std::all_of(line.begin(), line.end(), [&](Vec2 p) { return p == line.front(); })) {
      throw Error(Errc::InfeasiblePlan, "cut collapses to a point inside the safe region");
    }
    const std::vector<Vec2> pts = plunge_points(line, profile.pause_spacing);
    std::vector<double> heading(pts.size(), 0.0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const Vec2 d = pts[i + 1] - pts[i];
      heading[i] = std::atan2(d.y, d.x);
    }
    heading.back() = heading[pts.size() - 2];

    std::vector<std::size_t> bottoms;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec3 top{pts[i].x, pts[i].y, profile.z_travel};
      if (last) t += std::max(kMinTravelTime, distance(*last, top) / profile.travel_speed);
      out.waypoints.push_back({t, top.x, top.y, top.z, heading[i]});
      for (int k = 1; k <= s; ++k) {
        t += sample_dt;
        double z = profile.z_travel - amplitude * (1.0 - std::cos(2.0 * std::numbers::pi * k / s)) / 2.0;
        if (2 * k == s) {
          z = profile.z_cut_depth;
          bottoms.push_back(out.waypoints.size());
        }
        if (k == s) z = profile.z_travel;
        out.waypoints.push_back({t, top.x, top.y, z, heading[i]});
      }
      last = top;
    }
    out.plunge_bottoms.push_back(std::move(bottoms));
  }
  out.waypoints = workspace::clamp_plan(region, out.waypoints);
  return out;
}

}  // namespace meatcut::planner
