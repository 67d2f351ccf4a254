#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "meatcut/geometry.hpp"
#include "meatcut/scene.hpp"

namespace meatcut::vision {

/// Integer pixel index (column x, row y).
struct Pixel {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(Pixel, Pixel) = default;
  // Row-major order.
  friend constexpr std::strong_ordering operator<=>(Pixel a, Pixel b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

/// Camera-frame coordinates of a pixel's center.
inline Vec2 pixel_center(Pixel p) { return {p.x + 0.5, p.y + 0.5}; }

using Contour = std::vector<Pixel>;

/// Inclusive per-channel color range.
struct RgbRange {
  Rgb lo;
  Rgb hi;
  bool contains(Rgb c) const {
    return c.r >= lo.r && c.r <= hi.r && c.g >= lo.g && c.g <= hi.g && c.b >= lo.b && c.b <= hi.b;
  }
};

struct ColorRanges {
  RgbRange meat{{120, 0, 0}, {255, 100, 100}};
  RgbRange fat{{180, 180, 180}, {255, 255, 255}};
  RgbRange marker{{100, 0, 100}, {200, 90, 220}};

  /// Throws Errc::InvalidArgument unless lo <= hi channel-wise.
  void validate() const;
};

class Mask {
 public:
  Mask(int width, int height) : width_(width), height_(height), bits_(std::size_t(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool get(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_ && bits_[std::size_t(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool on = true) { bits_[std::size_t(y) * width_ + x] = on ? 1 : 0; }
  bool empty() const;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

/// An 8-connected set of pixels, sorted row-major.
struct Component {
  std::vector<Pixel> pixels;

  std::size_t area() const { return pixels.size(); }
  Vec2 centroid() const;  ///< mean of pixel centers
};

/// All 8-connected components, ordered by their first pixel in row-major
/// order.
std::vector<Component> connected_components(const Mask& mask);

/// The component with most pixels; ties go to the one whose first pixel comes
/// first in row-major order. Empty mask gives nullopt.
std::optional<Component> largest_component(const Mask& mask);

/// Moore-neighbour trace of the component's outer boundary, counter-clockwise
/// as seen on screen (image rows grow downwards), starting at the component's
/// first pixel in row-major order. A one-pixel component yields that pixel.
Contour trace_contour(const Component& component);

struct SegmentationOptions {
  ColorRanges colors;
  std::size_t marker_min_area = 9;
};

struct SceneSegmentation {
  Contour meat_contour;
  std::optional<Contour> fat_contour;
  std::vector<Vec2> markers;  ///< camera-frame centroids
  std::size_t meat_area = 0;
  std::size_t fat_area = 0;
  Vec2 meat_centroid;
  std::optional<Vec2> fat_centroid;
};

/// Color segmentation of the board area.
///
/// Meat is the largest component inside the meat range, fat the largest in the
/// fat range, markers every marker-range component with at least
/// `marker_min_area` pixels. Pixels outside the board rectangle are ignored.
/// Throws Errc::NoMeat or Errc::AmbiguousMarkers (more than two markers).
SceneSegmentation segment_scene(const Scene& scene, const SegmentationOptions& options = {});

/// Meat-contour points within `tol` pixels of the fat contour, deduplicated,
/// in contour order; the cyclic sequence is rotated so it starts right after
/// its widest gap. Throws Errc::InvalidArgument without a fat contour and
/// Errc::NoInterface when no point is close enough.
std::vector<Pixel> fat_meat_interface(const SceneSegmentation& seg, double tol = 2.0);

nlohmann::json to_json(const SceneSegmentation& seg);

}  // namespace meatcut::vision
