#include "meatcut/geometry.hpp"

#include <algorithm>

#include "meatcut/error.hpp"

namespace meatcut {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InsufficientData: return "insufficient-data";
    case Errc::RankDeficient: return "rank-deficient";
    case Errc::NoConvergence: return "no-convergence";
    case Errc::EmptyInput: return "empty-input";
    case Errc::InvalidArgument: return "invalid-argument";
    case Errc::SafetyViolation: return "safety-violation";
    case Errc::NoMeat: return "no-meat";
    case Errc::AmbiguousMarkers: return "ambiguous-markers";
    case Errc::NoInterface: return "no-interface";
    case Errc::InfeasiblePlan: return "infeasible-plan";
    case Errc::DegenerateCut: return "degenerate-cut";
    case Errc::InsufficientPoints: return "insufficient-points";
    case Errc::Stall: return "stall";
    case Errc::Alignment: return "alignment";
    case Errc::Parse: return "parse";
    case Errc::Integrity: return "integrity";
    case Errc::InfeasibleSplit: return "infeasible-split";
    case Errc::DegenerateModel: return "degenerate-model";
    case Errc::Spec: return "spec";
    case Errc::Geometry: return "geometry";
    case Errc::Io: return "io";
  }
  return "unknown";
}

double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(radians, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + s * ab);
}

Vec3 closest_point_on_segment(Vec3 p, Vec3 a, Vec3 b) {
  const Vec3 ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y + ab.z * ab.z;
  if (len2 == 0.0) return a;
  const Vec3 ap = p - a;
  const double s = std::clamp((ap.x * ab.x + ap.y * ab.y + ap.z * ab.z) / len2, 0.0, 1.0);
  return a + s * ab;
}

double polyline_length(std::span<const Vec2> points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += distance(points[i - 1], points[i]);
  return total;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double signed_area(std::span<const Vec2> ring) {
  double twice = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * twice;
}

}  // namespace meatcut
