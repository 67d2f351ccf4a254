#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace meatcut::vision {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(Rgb, Rgb) = default;
};

/// Pixel rectangle [x, x + width) x [y, y + height).
struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool contains(int px, int py) const { return px >= x && px < x + width && py >= y && py < y + height; }
  bool empty() const { return width <= 0 || height <= 0; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Row-major RGB raster of the cutting board and its surroundings.
///
/// Pixel (i, j) covers the camera-frame square [i, i+1) x [j, j+1); its center
/// is (i + 0.5, j + 0.5).
struct Scene {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;
  PixelRect board;

  Scene() = default;
  Scene(int w, int h, Rgb fill, PixelRect board_region);

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  Rgb at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  /// Throws Errc::InvalidArgument when dimensions, pixel count or board
  /// rectangle are inconsistent.
  void validate() const;
};

// Binary PPM (P6, maxval 255). The board rectangle travels in a header
// comment "# board x y w h"; without it the whole image is the board.
void write_ppm(std::ostream& out, const Scene& scene);
Scene read_ppm(std::istream& in);

}  // namespace meatcut::vision
