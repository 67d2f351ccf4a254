#pragma once

#include <optional>
#include <span>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/linestring.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "meatcut/geometry.hpp"

namespace meatcut::harness {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, false>;  // counter-clockwise, closed
using BMulti = bg::model::multi_polygon<BPolygon>;
using BLine = bg::model::linestring<BPoint>;

/// Ground-truth material of one piece, robot frame, meters.
struct Piece {
  BMulti meat;
  BMulti fat;
};

double area(const BMulti& m);
double meat_area(const Piece& p);
double fat_area(const Piece& p);
double total_area(const Piece& p);
std::optional<Vec2> centroid(const BMulti& m);

struct Box {
  double x_min, x_max, y_min, y_max;
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};
/// Bounding box of meat and fat together; nullopt for an empty piece.
std::optional<Box> bounds(const Piece& p);

/// Closed ring to a valid counter-clockwise polygon. Throws Errc::Geometry
/// when the ring self-intersects or has fewer than 3 distinct points.
BPolygon to_polygon(std::span<const Vec2> ring);
std::vector<Vec2> outer_ring(const BPolygon& polygon);

/// Region to the left of a cut path: the path extended along its end
/// tangents to a circle of `radius` around its midpoint, closed by the
/// counter-clockwise arc from the exit point back to the entry point. This
/// models the blade separating everything it crosses. Throws Errc::Geometry
/// for a path with fewer than 2 distinct points or one whose extension
/// self-intersects.
BPolygon left_region(std::span<const Vec2> path, double radius = 10.0);

bool contains(const BPolygon& region, Vec2 p);

struct Split {
  Piece left;
  Piece right;
};

/// Exact partition of a piece by a region: left = piece within, right = the
/// remainder. Areas add up to the parent's up to floating rounding.
Split split_piece(const Piece& piece, const BPolygon& region);

/// Length of `path` inside the material of `piece`.
double length_inside(std::span<const Vec2> path, const Piece& piece);

/// Material-free pieces (total area below `eps`, m^2) are dropped by the
/// pipeline.
inline constexpr double kEmptyArea = 1e-14;
inline bool is_empty(const Piece& p) { return total_area(p) < kEmptyArea; }

}  // namespace meatcut::harness
