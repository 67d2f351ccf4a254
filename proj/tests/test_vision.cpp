#include <algorithm>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"

#include "meatcut/error.hpp"
#include "meatcut/scene.hpp"
#include "meatcut/vision.hpp"

using namespace meatcut;
using namespace meatcut::vision;

namespace {

const Rgb kRed{200, 30, 30};
const Rgb kWhite{240, 240, 240};
const Rgb kPurple{150, 40, 160};
const Rgb kBlack{0, 0, 0};

Scene board(int w, int h) { return Scene(w, h, Rgb{90, 90, 90}, PixelRect{5, 5, w - 10, h - 10}); }

void fill_rect(Scene& s, int x, int y, int w, int h, Rgb c) {
  for (int j = y; j < y + h; ++j)
    for (int i = x; i < x + w; ++i) s.at(i, j) = c;
}

void paint_board(Scene& s) { fill_rect(s, s.board.x, s.board.y, s.board.width, s.board.height, kBlack); }

// Breadth-first 8-connected labelling, independent of the library's stack walk.
std::vector<std::set<Pixel>> oracle_components(const Mask& m) {
  std::vector<std::set<Pixel>> out;
  std::set<Pixel> seen;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y) || seen.count({x, y})) continue;
      std::set<Pixel> comp;
      std::queue<Pixel> q;
      q.push({x, y});
      seen.insert({x, y});
      while (!q.empty()) {
        const Pixel p = q.front();
        q.pop();
        comp.insert(p);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const Pixel n{p.x + dx, p.y + dy};
            if (m.get(n.x, n.y) && seen.insert(n).second) q.push(n);
          }
      }
      out.push_back(std::move(comp));
    }
  }
  return out;
}

bool is_boundary(const std::set<Pixel>& comp, Pixel p) {
  for (Pixel d : {Pixel{1, 0}, Pixel{-1, 0}, Pixel{0, 1}, Pixel{0, -1}}) {
    if (!comp.count({p.x + d.x, p.y + d.y})) return true;
  }
  return false;
}

// Random hole-free blob: a union of overlapping rectangles grown from a seed.
void plant_blob(Scene& s, std::mt19937_64& rng, int cx, int cy, int spread, Rgb color) {
  std::uniform_int_distribution<int> off(-spread, spread);
  std::uniform_int_distribution<int> size(3, 12);
  for (int k = 0; k < 6; ++k) {
    const int w = size(rng), h = size(rng);
    const int x = std::clamp(cx + off(rng), s.board.x, s.board.x + s.board.width - w);
    const int y = std::clamp(cy + off(rng), s.board.y, s.board.y + s.board.height - h);
    fill_rect(s, x, y, w, h, color);
    cx = x + w / 2;
    cy = y + h / 2;
  }
}

Mask color_mask(const Scene& s, const RgbRange& r) {
  Mask m(s.width, s.height);
  for (int y = s.board.y; y < s.board.y + s.board.height; ++y)
    for (int x = s.board.x; x < s.board.x + s.board.width; ++x)
      if (r.contains(s.at(x, y))) m.set(x, y);
  return m;
}

}  // namespace

TEST_CASE("rectangle on a black board") {
  Scene s = board(100, 80);
  paint_board(s);
  fill_rect(s, 20, 20, 40, 30, kRed);
  const SceneSegmentation seg = segment_scene(s);
  CHECK(seg.meat_area == 1200);
  CHECK_FALSE(seg.fat_contour.has_value());
  CHECK(seg.markers.empty());
  CHECK(seg.meat_contour.front() == Pixel{20, 20});
  CHECK(seg.meat_contour.size() == 2 * 40 + 2 * 30 - 4);
  CHECK(seg.meat_centroid.x == doctest::Approx(40.0));
  CHECK(seg.meat_centroid.y == doctest::Approx(35.0));
}

TEST_CASE("largest red blob wins") {
  Scene s = board(120, 80);
  paint_board(s);
  fill_rect(s, 10, 10, 20, 25, kRed);  // 500
  fill_rect(s, 50, 10, 30, 30, kRed);  // 900
  CHECK(segment_scene(s).meat_area == 900);
}

TEST_CASE("no meat and too many markers are errors") {
  Scene s = board(60, 60);
  paint_board(s);
  try {
    segment_scene(s);
    FAIL("no-meat scene accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoMeat);
  }
  fill_rect(s, 10, 10, 10, 10, kRed);
  for (int k = 0; k < 3; ++k) fill_rect(s, 25 + 8 * k, 30, 4, 4, kPurple);
  try {
    segment_scene(s);
    FAIL("three markers accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AmbiguousMarkers);
  }
}

TEST_CASE("planted meat, fat band and two markers match the planting script") {
  Scene s = board(120, 100);
  paint_board(s);
  fill_rect(s, 20, 30, 50, 30, kRed);
  fill_rect(s, 20, 20, 50, 10, kWhite);
  fill_rect(s, 90, 20, 6, 6, kPurple);
  fill_rect(s, 90, 70, 6, 6, kPurple);
  fill_rect(s, 100, 50, 2, 2, kPurple);  // below the area threshold
  const SceneSegmentation seg = segment_scene(s);
  CHECK(seg.meat_area == 1500);
  CHECK(seg.fat_area == 500);
  REQUIRE(seg.markers.size() == 2);
  CHECK(seg.markers[0] == Vec2{93.0, 23.0});
  CHECK(seg.markers[1] == Vec2{93.0, 73.0});
}

TEST_CASE("largest_component tie-break and single pixel") {
  Mask m(20, 20);
  CHECK_FALSE(largest_component(m).has_value());
  m.set(5, 5);
  const auto one = largest_component(m);
  REQUIRE(one);
  CHECK(one->pixels == std::vector<Pixel>{{5, 5}});
  CHECK(trace_contour(*one) == Contour{{5, 5}});
  Mask two(20, 20);
  for (int i = 0; i < 3; ++i) {
    two.set(10 + i, 2);
    two.set(1 + i, 8);
  }
  CHECK(largest_component(two)->pixels.front() == Pixel{10, 2});
}

TEST_CASE("3x3 square traces its 8 boundary pixels counter-clockwise on screen") {
  Mask m(10, 10);
  for (int y = 2; y < 5; ++y)
    for (int x = 2; x < 5; ++x) m.set(x, y);
  const Contour c = trace_contour(*largest_component(m));
  // Screen counter-clockwise from the top-left: down the left side first.
  const Contour expected{{2, 2}, {2, 3}, {2, 4}, {3, 4}, {4, 4}, {4, 3}, {4, 2}, {3, 2}};
  CHECK(c == expected);
}

TEST_CASE("components, areas and contours match the flood-fill oracle on random masks") {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution on(0.45);
  for (int trial = 0; trial < 30; ++trial) {
    Mask m(30, 24);
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 30; ++x)
        if (on(rng)) m.set(x, y);
    const auto got = connected_components(m);
    const auto want = oracle_components(m);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(std::set<Pixel>(got[i].pixels.begin(), got[i].pixels.end()) == want[i]);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < want.size(); ++i)
      if (want[i].size() > want[best].size()) best = i;
    CHECK(largest_component(m)->area() == want[best].size());
  }
}

TEST_CASE("traced contour visits exactly the outer boundary of hole-free blobs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    Scene s = board(80, 80);
    paint_board(s);
    plant_blob(s, rng, 40, 40, 6, kRed);
    const Mask m = color_mask(s, ColorRanges{}.meat);
    const auto comp = largest_component(m);
    REQUIRE(comp);
    const std::set<Pixel> pix(comp->pixels.begin(), comp->pixels.end());
    const Contour c = trace_contour(*comp);
    CHECK(c.front() == comp->pixels.front());
    for (Pixel p : c) CHECK(is_boundary(pix, p));
    // Boundary pixels reachable from outside through background 4-connectivity.
    Mask outside(82, 82);
    std::queue<Pixel> q;
    q.push({0, 0});
    outside.set(0, 0);
    while (!q.empty()) {
      const Pixel p = q.front();
      q.pop();
      for (Pixel d : {Pixel{1, 0}, Pixel{-1, 0}, Pixel{0, 1}, Pixel{0, -1}}) {
        const Pixel n{p.x + d.x, p.y + d.y};
        if (n.x < 0 || n.y < 0 || n.x >= 82 || n.y >= 82 || outside.get(n.x, n.y)) continue;
        if (pix.count({n.x - 1, n.y - 1})) continue;
        outside.set(n.x, n.y);
        q.push(n);
      }
    }
    std::set<Pixel> outer;
    for (Pixel p : pix) {
      for (Pixel d : {Pixel{1, 0}, Pixel{-1, 0}, Pixel{0, 1}, Pixel{0, -1}}) {
        if (outside.get(p.x + d.x + 1, p.y + d.y + 1)) outer.insert(p);
      }
    }
    CHECK(std::set<Pixel>(c.begin(), c.end()) == outer);
  }
}

TEST_CASE("segmentation ignores everything outside the board") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> byte(0, 255);
  Scene s = board(90, 70);
  paint_board(s);
  plant_blob(s, rng, 40, 30, 5, kRed);
  fill_rect(s, 60, 40, 10, 8, kWhite);
  const auto reference = to_json(segment_scene(s));
  for (int trial = 0; trial < 20; ++trial) {
    Scene t = s;
    for (int y = 0; y < t.height; ++y)
      for (int x = 0; x < t.width; ++x)
        if (!t.board.contains(x, y)) t.at(x, y) = Rgb{std::uint8_t(byte(rng)), std::uint8_t(byte(rng)), std::uint8_t(byte(rng))};
    CHECK(to_json(segment_scene(t)) == reference);
  }
}

TEST_CASE("fat-meat interface along a shared edge") {
  Scene s = board(120, 100);
  paint_board(s);
  fill_rect(s, 30, 40, 30, 20, kRed);
  fill_rect(s, 30, 30, 30, 10, kWhite);
  const SceneSegmentation seg = segment_scene(s);
  const auto iface = fat_meat_interface(seg, 1.5);
  // Oracle: meat contour points within tol of any fat contour point, in contour order.
  std::vector<Pixel> want;
  for (Pixel p : seg.meat_contour) {
    for (Pixel f : *seg.fat_contour) {
      if (std::hypot(p.x - f.x, p.y - f.y) <= 1.5) {
        want.push_back(p);
        break;
      }
    }
  }
  CHECK(iface.size() == 30);
  CHECK(std::set<Pixel>(iface.begin(), iface.end()) == std::set<Pixel>(want.begin(), want.end()));
  for (Pixel p : iface) CHECK(p.y == 40);
  // One contiguous run in contour order.
  const bool ascending = iface.front().x < iface.back().x;
  for (std::size_t i = 1; i < iface.size(); ++i) CHECK(iface[i].x == iface[i - 1].x + (ascending ? 1 : -1));
}

TEST_CASE("interface errors") {
  Scene s = board(150, 100);
  paint_board(s);
  fill_rect(s, 10, 10, 20, 20, kRed);
  CHECK_THROWS_AS(fat_meat_interface(segment_scene(s)), Error);
  fill_rect(s, 80, 10, 20, 20, kWhite);
  try {
    fat_meat_interface(segment_scene(s), 1.5);
    FAIL("distant fat accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoInterface);
  }
}

TEST_CASE("PPM round trip keeps the board rectangle") {
  Scene s = board(30, 20);
  fill_rect(s, 8, 8, 4, 4, kRed);
  std::stringstream io;
  write_ppm(io, s);
  const Scene t = read_ppm(io);
  CHECK(t.width == 30);
  CHECK(t.board == s.board);
  CHECK(t.pixels == s.pixels);
  std::istringstream bad("P3\n1 1\n255\n0 0 0\n");
  CHECK_THROWS_AS(read_ppm(bad), Error);
}

TEST_CASE("color range validation") {
  ColorRanges r;
  CHECK_NOTHROW(r.validate());
  r.fat.lo.g = 255;
  r.fat.hi.g = 0;
  CHECK_THROWS_AS(r.validate(), Error);
}
