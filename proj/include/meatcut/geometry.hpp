#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace meatcut {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

using Polyline2 = std::vector<Vec2>;

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm(Vec3 a) { return std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

/// Euclidean distance from `p` to the closed segment [a, b].
double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);

/// Closest point to `p` on the closed segment [a, b] (3-D).
Vec3 closest_point_on_segment(Vec3 p, Vec3 a, Vec3 b);

double polyline_length(std::span<const Vec2> points);

/// Crossing test against a closed ring (even-odd rule).
bool point_in_polygon(Vec2 p, std::span<const Vec2> ring);

/// Signed shoelace area of a closed ring (positive when counter-clockwise
/// in a y-up frame).
double signed_area(std::span<const Vec2> ring);

}  // namespace meatcut
