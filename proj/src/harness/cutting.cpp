#include "meatcut/harness/cutting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "meatcut/error.hpp"

namespace meatcut::harness {

double area(const BMulti& m) { return bg::area(m); }
double meat_area(const Piece& p) { return area(p.meat); }
double fat_area(const Piece& p) { return area(p.fat); }
double total_area(const Piece& p) { return meat_area(p) + fat_area(p); }

std::optional<Vec2> centroid(const BMulti& m) {
  if (area(m) <= 0.0) return std::nullopt;
  BPoint c{0.0, 0.0};
  bg::centroid(m, c);
  return Vec2{c.x(), c.y()};
}

std::optional<Box> bounds(const Piece& p) {
  std::optional<Box> out;
  for (const BMulti* m : {&p.meat, &p.fat}) {
    if (m->empty()) continue;
    const auto b = bg::return_envelope<bg::model::box<BPoint>>(*m);
    const Box box{b.min_corner().x(), b.max_corner().x(), b.min_corner().y(), b.max_corner().y()};
    if (!out) {
      out = box;
    } else {
      out = Box{std::min(out->x_min, box.x_min), std::max(out->x_max, box.x_max), std::min(out->y_min, box.y_min),
                std::max(out->y_max, box.y_max)};
    }
  }
  return out;
}

BPolygon to_polygon(std::span<const Vec2> ring) {
  BPolygon poly;
  for (Vec2 p : ring) {
    if (!poly.outer().empty() && bg::get<0>(poly.outer().back()) == p.x && bg::get<1>(poly.outer().back()) == p.y) {
      continue;
    }
    poly.outer().push_back({p.x, p.y});
  }
  bg::correct(poly);
  std::string reason;
  if (poly.outer().size() < 4 || !bg::is_valid(poly, reason)) {
    throw Error(Errc::Geometry, "invalid polygon: " + (reason.empty() ? std::string("too few points") : reason));
  }
  return poly;
}

std::vector<Vec2> outer_ring(const BPolygon& polygon) {
  std::vector<Vec2> out;
  for (const BPoint& p : polygon.outer()) out.push_back({p.x(), p.y()});
  if (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

BPolygon left_region(std::span<const Vec2> path, double radius) {
  std::vector<Vec2> pts;
  for (Vec2 p : path) {
    if (pts.empty() || distance(pts.back(), p) > 1e-12) pts.push_back(p);
  }
  if (pts.size() < 2) throw Error(Errc::Geometry, "cut path needs two distinct points");

  Vec2 mid;
  for (Vec2 p : pts) mid = mid + p;
  mid = (1.0 / static_cast<double>(pts.size())) * mid;
  for (Vec2 p : pts) {
    if (distance(p, mid) >= radius) throw Error(Errc::Geometry, "cut path does not fit inside the cutting circle");
  }

  // Forward distance along `dir` from `p` to the circle.
  auto to_circle = [&](Vec2 p, Vec2 dir) {
    const Vec2 d = (1.0 / norm(dir)) * dir;
    const Vec2 q = p - mid;
    const double b = dot(q, d);
    const double c = dot(q, q) - radius * radius;
    return p + (-b + std::sqrt(b * b - c)) * d;
  };
  const Vec2 entry = to_circle(pts.front(), pts[0] - pts[1]);
  const Vec2 exit = to_circle(pts.back(), pts[pts.size() - 1] - pts[pts.size() - 2]);

  std::vector<Vec2> ring{entry};
  ring.insert(ring.end(), pts.begin(), pts.end());
  ring.push_back(exit);
  const double a_exit = std::atan2(exit.y - mid.y, exit.x - mid.x);
  const double a_entry = std::atan2(entry.y - mid.y, entry.x - mid.x);
  double sweep = std::fmod(a_entry - a_exit, 2.0 * std::numbers::pi);
  if (sweep <= 0.0) sweep += 2.0 * std::numbers::pi;
  constexpr int kArcPoints = 256;
  for (int k = 1; k < kArcPoints; ++k) {
    const double a = a_exit + sweep * k / kArcPoints;
    ring.push_back(mid + radius * Vec2{std::cos(a), std::sin(a)});
  }

  BPolygon poly;
  for (Vec2 p : ring) poly.outer().push_back({p.x, p.y});
  poly.outer().push_back(poly.outer().front());
  // The ring traverses the path then turns counter-clockwise, so it is CCW
  // unless the extension folded back over the path.
  std::string reason;
  if (bg::area(poly) <= 0.0 || !bg::is_valid(poly, reason)) {
    throw Error(Errc::Geometry, "cut path extension self-intersects" + (reason.empty() ? "" : ": " + reason));
  }
  return poly;
}

bool contains(const BPolygon& region, Vec2 p) { return bg::covered_by(BPoint{p.x, p.y}, region); }

namespace {

BMulti intersect(const BMulti& m, const BPolygon& region) {
  BMulti out;
  if (!m.empty()) bg::intersection(m, region, out);
  return out;
}

BMulti subtract(const BMulti& m, const BPolygon& region) {
  BMulti out;
  if (!m.empty()) bg::difference(m, region, out);
  return out;
}

}  // namespace

Split split_piece(const Piece& piece, const BPolygon& region) {
  return {{intersect(piece.meat, region), intersect(piece.fat, region)},
          {subtract(piece.meat, region), subtract(piece.fat, region)}};
}

double length_inside(std::span<const Vec2> path, const Piece& piece) {
  BLine line;
  for (Vec2 p : path) line.push_back({p.x, p.y});
  double total = 0.0;
  for (const BMulti* m : {&piece.meat, &piece.fat}) {
    if (m->empty()) continue;
    bg::model::multi_linestring<BLine> inside;
    bg::intersection(line, *m, inside);
    total += bg::length(inside);
  }
  return total;
}

}  // namespace meatcut::harness
