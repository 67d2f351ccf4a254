#include "meatcut/harness/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "meatcut/calib.hpp"
#include "meatcut/error.hpp"

namespace meatcut::harness {

using nlohmann::json;

void MeatSpec::validate() const {
  if (!(semi_x_cm > 0.0) || !(semi_y_cm > 0.0) || !(thickness_cm > 0.0) || !(density > 0.0)) {
    throw Error(Errc::Spec, "meat dimensions, thickness and density must be positive");
  }
  if (vertices < 8) throw Error(Errc::Spec, "outline needs at least 8 vertices");
  if (!(fat.thickness_cm >= 0.0)) throw Error(Errc::Spec, "fat band thickness must be non-negative");
  if (fat.thickness_cm > 0.0) {
    if (outline == Outline::Rectangle) throw Error(Errc::Spec, "fat bands are only generated on elliptic outlines");
    if (!(fat.coverage > 0.0 && fat.coverage <= 1.0)) throw Error(Errc::Spec, "fat coverage must lie in (0, 1]");
    if (!(fat.taper > 0.0 && fat.taper <= 0.5)) throw Error(Errc::Spec, "fat taper must lie in (0, 0.5]");
  }
  double total = 0.0;
  for (const Harmonic& h : harmonics) {
    if (h.order < 1) throw Error(Errc::Spec, "harmonic order must be >= 1");
    total += std::abs(h.amplitude);
  }
  if (total >= 0.5) throw Error(Errc::Spec, "harmonic amplitudes must sum below 0.5");
}

json to_json(const MeatSpec& s) {
  json harmonics = json::array();
  for (const Harmonic& h : s.harmonics) harmonics.push_back({{"order", h.order}, {"amplitude", h.amplitude}, {"phase", h.phase}});
  return {{"outline", s.outline == Outline::Ellipse ? "ellipse" : "rectangle"},
          {"center_cm", {s.center_cm.x, s.center_cm.y}},
          {"semi_x_cm", s.semi_x_cm},
          {"semi_y_cm", s.semi_y_cm},
          {"harmonics", harmonics},
          {"fat", {{"thickness_cm", s.fat.thickness_cm}, {"coverage", s.fat.coverage}, {"taper", s.fat.taper}}},
          {"thickness_cm", s.thickness_cm},
          {"density", s.density},
          {"vertices", s.vertices},
          {"seed", s.seed}};
}

MeatSpec meat_spec_from_json(const json& j) {
  MeatSpec s;
  try {
    const auto outline = j.value("outline", std::string("ellipse"));
    if (outline == "rectangle") {
      s.outline = Outline::Rectangle;
    } else if (outline != "ellipse") {
      throw Error(Errc::Spec, "outline must be 'ellipse' or 'rectangle'");
    }
    if (j.contains("center_cm")) {
      const auto c = j.at("center_cm").get<std::vector<double>>();
      if (c.size() != 2) throw Error(Errc::Spec, "center_cm needs 2 values");
      s.center_cm = {c[0], c[1]};
    }
    s.semi_x_cm = j.value("semi_x_cm", s.semi_x_cm);
    s.semi_y_cm = j.value("semi_y_cm", s.semi_y_cm);
    if (j.contains("harmonics")) {
      for (const json& h : j.at("harmonics")) {
        s.harmonics.push_back({h.at("order").get<int>(), h.at("amplitude").get<double>(), h.value("phase", 0.0)});
      }
    }
    if (j.contains("fat")) {
      const json& f = j.at("fat");
      s.fat.thickness_cm = f.value("thickness_cm", s.fat.thickness_cm);
      s.fat.coverage = f.value("coverage", s.fat.coverage);
      s.fat.taper = f.value("taper", s.fat.taper);
    }
    s.thickness_cm = j.value("thickness_cm", s.thickness_cm);
    s.density = j.value("density", s.density);
    s.vertices = j.value("vertices", s.vertices);
    s.seed = j.value("seed", s.seed);
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("meat spec: ") + e.what());
  }
  s.validate();
  return s;
}

MeatSpec random_loin(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MeatSpec s;
  s.center_cm = {55.0 + 2.0 * (u(rng) - 0.5), 2.0 * (u(rng) - 0.5)};
  s.semi_x_cm = 12.0 + 2.0 * u(rng);
  s.semi_y_cm = 4.5 + 1.0 * u(rng);
  for (int k = 2; k <= 4; ++k) s.harmonics.push_back({k, 0.04 * u(rng), 2.0 * std::numbers::pi * u(rng)});
  s.fat = {0.8 + 0.6 * u(rng), 0.6 + 0.25 * u(rng), 0.2};
  s.thickness_cm = 6.0;
  s.seed = seed;
  return s;
}

MeatSpec random_chop(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MeatSpec s;
  s.center_cm = {55.0 + 4.0 * (u(rng) - 0.5), 4.0 * (u(rng) - 0.5)};
  s.semi_x_cm = 6.0 + 2.0 * u(rng);
  s.semi_y_cm = 4.0 + 1.0 * u(rng);
  s.harmonics.push_back({3, 0.03 * u(rng), 2.0 * std::numbers::pi * u(rng)});
  s.fat = {1.0 + 0.5 * u(rng), 0.5 + 0.2 * u(rng), 0.2};
  s.thickness_cm = 2.5;
  s.seed = seed;
  return s;
}

Piece build_piece(const MeatSpec& spec) {
  spec.validate();
  const Vec2 c = 0.01 * spec.center_cm;
  const double a = 0.01 * spec.semi_x_cm;
  const double b = 0.01 * spec.semi_y_cm;
  Piece piece;

  if (spec.outline == Outline::Rectangle) {
    const std::vector<Vec2> ring{{c.x - a, c.y - b}, {c.x + a, c.y - b}, {c.x + a, c.y + b}, {c.x - a, c.y + b}};
    piece.meat.push_back(to_polygon(ring));
    return piece;
  }

  const int n = spec.vertices;
  std::vector<Vec2> ring(static_cast<std::size_t>(n));
  std::vector<double> angle(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * i / n;
    double r = 1.0;
    for (const Harmonic& h : spec.harmonics) r += h.amplitude * std::cos(h.order * th + h.phase);
    ring[static_cast<std::size_t>(i)] = c + Vec2{a * r * std::cos(th), b * r * std::sin(th)};
    angle[static_cast<std::size_t>(i)] = th;
  }
  piece.meat.push_back(to_polygon(ring));
  if (spec.fat.thickness_cm <= 0.0) return piece;

  // Band over angles centred on 3pi/2 (the -y side), thickness offset along -y.
  const double half = 0.5 * std::numbers::pi * spec.fat.coverage;
  const double lo = 1.5 * std::numbers::pi - half;
  const double hi = 1.5 * std::numbers::pi + half;
  std::vector<std::size_t> chain;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (angle[i] >= lo && angle[i] <= hi) chain.push_back(i);
  }
  if (chain.size() < 3) throw Error(Errc::Spec, "fat band covers too few outline vertices");
  const double t_max = 0.01 * spec.fat.thickness_cm;
  std::vector<Vec2> fat{ring[chain.front()]};
  for (std::size_t k = 1; k + 1 < chain.size(); ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(chain.size() - 1);
    const double ramp = std::min({1.0, s / spec.fat.taper, (1.0 - s) / spec.fat.taper});
    const double t = t_max * std::sin(0.5 * std::numbers::pi * ramp);
    fat.push_back(ring[chain[k]] - Vec2{0.0, t});
  }
  fat.push_back(ring[chain.back()]);
  for (std::size_t k = chain.size() - 1; k-- > 1;) fat.push_back(ring[chain[k]]);
  try {
    piece.fat.push_back(to_polygon(fat));
  } catch (const Error& e) {
    throw Error(Errc::Spec, std::string("fat band is not a simple polygon: ") + e.what());
  }
  return piece;
}

Box board_in_robot_frame(const Config& config) {
  const auto& r = config.camera.board;
  const auto& p = config.camera.params;
  Box box{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (Vec2 corner : {Vec2{double(r.x), double(r.y)}, Vec2{double(r.x + r.width), double(r.y)},
                      Vec2{double(r.x), double(r.y + r.height)}, Vec2{double(r.x + r.width), double(r.y + r.height)}}) {
    const Vec2 q = calib::pixel_to_robot(p, corner);
    box = {std::min(box.x_min, q.x), std::max(box.x_max, q.x), std::min(box.y_min, q.y), std::max(box.y_max, q.y)};
  }
  return box;
}

namespace {

// Even-odd scanline fill of a multipolygon in pixel space, sampling pixel
// centers.
template <class Paint>
void fill(const BMulti& m, const calib::CalibrationParams& params, Paint&& paint) {
  struct Edge {
    Vec2 a, b;
  };
  std::vector<Edge> edges;
  double y_lo = INFINITY, y_hi = -INFINITY;
  auto add_ring = [&](const auto& ring) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const Vec2 a = calib::robot_to_pixel(params, {ring[i].x(), ring[i].y()});
      const Vec2 b = calib::robot_to_pixel(params, {ring[i + 1].x(), ring[i + 1].y()});
      edges.push_back({a, b});
      y_lo = std::min({y_lo, a.y, b.y});
      y_hi = std::max({y_hi, a.y, b.y});
    }
  };
  for (const BPolygon& poly : m) {
    add_ring(poly.outer());
    for (const auto& inner : poly.inners()) add_ring(inner);
  }
  if (edges.empty()) return;
  std::vector<double> xs;
  for (int j = static_cast<int>(std::floor(y_lo)); j <= static_cast<int>(std::ceil(y_hi)); ++j) {
    const double yc = j + 0.5;
    xs.clear();
    for (const Edge& e : edges) {
      if ((e.a.y <= yc) != (e.b.y <= yc)) xs.push_back(e.a.x + (yc - e.a.y) * (e.b.x - e.a.x) / (e.b.y - e.a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int i0 = static_cast<int>(std::ceil(xs[k] - 0.5));
      const int i1 = static_cast<int>(std::ceil(xs[k + 1] - 0.5));
      for (int i = i0; i < i1; ++i) paint(i, j);
    }
  }
}

}  // namespace

vision::Scene render_scene(std::span<const Piece> pieces, std::span<const Vec2> markers, const Config& config,
                           std::uint64_t noise_seed) {
  const RenderConfig& rc = config.render;
  const auto& board = config.camera.board;
  vision::Scene scene(config.camera.width, config.camera.height, rc.exterior, board);
  for (int y = board.y; y < board.y + board.height; ++y) {
    for (int x = board.x; x < board.x + board.width; ++x) scene.at(x, y) = rc.board;
  }
  auto painter = [&](vision::Rgb color) {
    return [&scene, &board, color](int i, int j) {
      if (board.contains(i, j)) scene.at(i, j) = color;
    };
  };
  for (const Piece& p : pieces) {
    fill(p.meat, config.camera.params, painter(rc.meat));
    fill(p.fat, config.camera.params, painter(rc.fat));
  }
  const int half = rc.marker_size_px / 2;
  for (Vec2 m : markers) {
    const Vec2 px = calib::robot_to_pixel(config.camera.params, m);
    const int ci = static_cast<int>(std::floor(px.x));
    const int cj = static_cast<int>(std::floor(px.y));
    for (int j = cj - half; j < cj - half + rc.marker_size_px; ++j) {
      for (int i = ci - half; i < ci - half + rc.marker_size_px; ++i) painter(rc.marker)(i, j);
    }
  }
  if (rc.jitter > 0) {
    std::mt19937_64 rng(noise_seed);
    std::uniform_int_distribution<int> d(-rc.jitter, rc.jitter);
    for (vision::Rgb& p : scene.pixels) {
      for (std::uint8_t* ch : {&p.r, &p.g, &p.b}) *ch = static_cast<std::uint8_t>(std::clamp(*ch + d(rng), 0, 255));
    }
  }
  return scene;
}

GeneratedScene generate_scene(const MeatSpec& spec, const Config& config) {
  Piece truth = build_piece(spec);
  const Box board = board_in_robot_frame(config);
  const auto b = bounds(truth);
  if (!b || b->x_min < board.x_min || b->x_max > board.x_max || b->y_min < board.y_min || b->y_max > board.y_max) {
    throw Error(Errc::Spec, "meat does not fit on the cutting board");
  }
  vision::Scene scene = render_scene(std::span<const Piece>(&truth, 1), {}, config, spec.seed);
  return {std::move(scene), std::move(truth)};
}

}  // namespace meatcut::harness
