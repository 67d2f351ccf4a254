#include "meatcut/vision.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <set>

#include "meatcut/error.hpp"

namespace meatcut::vision {

namespace {

// Clockwise on screen starting west: W, NW, N, NE, E, SE, S, SW.
constexpr std::array<Pixel, 8> kMoore = {{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

int moore_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    if (kMoore[i].x == dx && kMoore[i].y == dy) return i;
  }
  return -1;
}

void check_range(const RgbRange& r, const char* name) {
  if (r.lo.r > r.hi.r || r.lo.g > r.hi.g || r.lo.b > r.hi.b) {
    throw Error(Errc::InvalidArgument, std::string(name) + " color range has lo > hi");
  }
}

Mask board_mask(const Scene& scene, const RgbRange& range) {
  Mask mask(scene.width, scene.height);
  const PixelRect& b = scene.board;
  for (int y = b.y; y < b.y + b.height; ++y) {
    for (int x = b.x; x < b.x + b.width; ++x) {
      if (range.contains(scene.at(x, y))) mask.set(x, y);
    }
  }
  return mask;
}

}  // namespace

void ColorRanges::validate() const {
  check_range(meat, "meat");
  check_range(fat, "fat");
  check_range(marker, "marker");
}

bool Mask::empty() const {
  return std::none_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

Vec2 Component::centroid() const {
  Vec2 sum;
  for (Pixel p : pixels) sum = sum + pixel_center(p);
  return pixels.empty() ? sum : (1.0 / static_cast<double>(pixels.size())) * sum;
}

std::vector<Component> connected_components(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> label(std::size_t(w) * h, -1);
  std::vector<Component> out;
  std::vector<Pixel> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.get(x, y) || label[std::size_t(y) * w + x] >= 0) continue;
      const int id = static_cast<int>(out.size());
      Component comp;
      stack.assign(1, {x, y});
      label[std::size_t(y) * w + x] = id;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        comp.pixels.push_back(p);
        for (Pixel d : kMoore) {
          const int nx = p.x + d.x;
          const int ny = p.y + d.y;
          if (!mask.get(nx, ny)) continue;
          int& l = label[std::size_t(ny) * w + nx];
          if (l >= 0) continue;
          l = id;
          stack.push_back({nx, ny});
        }
      }
      std::sort(comp.pixels.begin(), comp.pixels.end());
      out.push_back(std::move(comp));
    }
  }
  return out;
}

std::optional<Component> largest_component(const Mask& mask) {
  std::vector<Component> all = connected_components(mask);
  if (all.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].area() > all[best].area()) best = i;
  }
  return std::move(all[best]);
}

Contour trace_contour(const Component& component) {
  if (component.pixels.empty()) return {};
  int min_x = std::numeric_limits<int>::max(), max_x = std::numeric_limits<int>::min();
  int min_y = std::numeric_limits<int>::max(), max_y = std::numeric_limits<int>::min();
  for (Pixel p : component.pixels) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  // Local bitmap with a one-pixel background frame.
  const int w = max_x - min_x + 3;
  const int h = max_y - min_y + 3;
  Mask local(w, h);
  for (Pixel p : component.pixels) local.set(p.x - min_x + 1, p.y - min_y + 1);
  auto fg = [&](Pixel p) { return local.get(p.x - min_x + 1, p.y - min_y + 1); };

  const Pixel start = *std::min_element(component.pixels.begin(), component.pixels.end());
  constexpr int kStartBacktrack = 0;  // west of the first row-major pixel is background

  Contour clockwise{start};
  Pixel cur = start;
  int backtrack = kStartBacktrack;
  const std::size_t cap = 4 * component.pixels.size() + 8;
  for (std::size_t step = 0; step < cap; ++step) {
    int found = -1;
    for (int k = 1; k <= 8; ++k) {
      const int d = (backtrack + k) % 8;
      if (fg({cur.x + kMoore[d].x, cur.y + kMoore[d].y})) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    const int prev = (found + 7) % 8;
    const Pixel next{cur.x + kMoore[found].x, cur.y + kMoore[found].y};
    const Pixel checked{cur.x + kMoore[prev].x, cur.y + kMoore[prev].y};
    backtrack = moore_index(checked.x - next.x, checked.y - next.y);
    cur = next;
    // Jacob's criterion: back at the start, entered the same way as initially.
    if (cur == start && backtrack == kStartBacktrack) break;
    clockwise.push_back(cur);
  }

  Contour ccw;
  ccw.reserve(clockwise.size());
  ccw.push_back(clockwise.front());
  for (auto it = clockwise.rbegin(); it + 1 != clockwise.rend(); ++it) ccw.push_back(*it);
  return ccw;
}

SceneSegmentation segment_scene(const Scene& scene, const SegmentationOptions& options) {
  scene.validate();
  options.colors.validate();

  SceneSegmentation seg;
  auto meat = largest_component(board_mask(scene, options.colors.meat));
  if (!meat) throw Error(Errc::NoMeat, "no meat-colored component on the board");
  seg.meat_contour = trace_contour(*meat);
  seg.meat_area = meat->area();
  seg.meat_centroid = meat->centroid();

  if (auto fat = largest_component(board_mask(scene, options.colors.fat))) {
    seg.fat_contour = trace_contour(*fat);
    seg.fat_area = fat->area();
    seg.fat_centroid = fat->centroid();
  }

  for (const Component& c : connected_components(board_mask(scene, options.colors.marker))) {
    if (c.area() >= options.marker_min_area) seg.markers.push_back(c.centroid());
  }
  if (seg.markers.size() > 2) {
    throw Error(Errc::AmbiguousMarkers,
                "found " + std::to_string(seg.markers.size()) + " markers; point-to-point needs exactly 2");
  }
  return seg;
}

std::vector<Pixel> fat_meat_interface(const SceneSegmentation& seg, double tol) {
  if (!seg.fat_contour || seg.fat_contour->empty()) {
    throw Error(Errc::InvalidArgument, "fat-meat interface needs a fat contour");
  }
  const Contour& meat = seg.meat_contour;
  const Contour& fat = *seg.fat_contour;
  const double tol2 = tol * tol;

  std::vector<std::size_t> close;
  for (std::size_t i = 0; i < meat.size(); ++i) {
    for (Pixel f : fat) {
      const double dx = meat[i].x - f.x;
      const double dy = meat[i].y - f.y;
      if (dx * dx + dy * dy <= tol2) {
        close.push_back(i);
        break;
      }
    }
  }
  if (close.empty()) throw Error(Errc::NoInterface, "meat and fat contours are farther apart than the tolerance");

  // Start after the widest cyclic gap so a run wrapping past index 0 stays whole.
  std::size_t start = 0;
  std::size_t widest = 0;
  for (std::size_t k = 0; k < close.size(); ++k) {
    const std::size_t prev = close[(k + close.size() - 1) % close.size()];
    const std::size_t gap = (close[k] + meat.size() - prev) % meat.size();
    const std::size_t effective = (close.size() == 1) ? meat.size() : gap;
    if (effective > widest) {
      widest = effective;
      start = k;
    }
  }

  std::vector<Pixel> out;
  std::set<Pixel> seen;
  for (std::size_t k = 0; k < close.size(); ++k) {
    const Pixel p = meat[close[(start + k) % close.size()]];
    if (seen.insert(p).second) out.push_back(p);
  }
  return out;
}

nlohmann::json to_json(const SceneSegmentation& seg) {
  auto contour_json = [](const Contour& c) {
    nlohmann::json arr = nlohmann::json::array();
    for (Pixel p : c) arr.push_back({p.x, p.y});
    return arr;
  };
  nlohmann::json j;
  j["meat_contour"] = contour_json(seg.meat_contour);
  j["fat_contour"] = seg.fat_contour ? contour_json(*seg.fat_contour) : nlohmann::json(nullptr);
  j["markers"] = nlohmann::json::array();
  for (Vec2 m : seg.markers) j["markers"].push_back({m.x, m.y});
  j["meat_area"] = seg.meat_area;
  j["fat_area"] = seg.fat_area;
  j["meat_centroid"] = {seg.meat_centroid.x, seg.meat_centroid.y};
  j["fat_centroid"] = seg.fat_centroid ? nlohmann::json{seg.fat_centroid->x, seg.fat_centroid->y} : nlohmann::json(nullptr);
  return j;
}

}  // namespace meatcut::vision
