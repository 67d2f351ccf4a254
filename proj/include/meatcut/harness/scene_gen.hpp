#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "meatcut/harness/config.hpp"
#include "meatcut/harness/cutting.hpp"
#include "meatcut/scene.hpp"

namespace meatcut::harness {

enum class Outline { Ellipse, Rectangle };

/// r(theta) = 1 + amplitude * cos(order * theta + phase) scales the ellipse.
struct Harmonic {
  int order = 2;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Fat layer on the image-top side of the meat (-y in the robot frame).
struct FatBand {
  double thickness_cm = 0.0;
  double coverage = 0.7;  ///< fraction of that half of the outline covered
  double taper = 0.2;     ///< fraction of the band over which thickness ramps from zero
};

struct MeatSpec {
  Outline outline = Outline::Ellipse;
  Vec2 center_cm{55.0, 0.0};  ///< robot frame
  double semi_x_cm = 13.0;    ///< half-length along x
  double semi_y_cm = 5.0;     ///< half-width along y
  std::vector<Harmonic> harmonics;
  FatBand fat;
  double thickness_cm = 6.0;  ///< height of the piece, for weights
  double density = 1.05;      ///< g/cm^3
  int vertices = 360;
  std::uint64_t seed = 0;     ///< render noise

  /// Throws Errc::Spec on non-positive dimensions, a negative fat band, or a
  /// fat band on a rectangle.
  void validate() const;
};

nlohmann::json to_json(const MeatSpec& spec);
MeatSpec meat_spec_from_json(const nlohmann::json& j);

/// Pork-loin-like blob about 26 x 10 cm with a fat band.
MeatSpec random_loin(std::uint64_t seed);
/// Chop-like blob about 14 x 9 cm with a curved fat cap.
MeatSpec random_chop(std::uint64_t seed);

/// Ground-truth polygons. Throws Errc::Spec when the fat band would not form
/// a simple polygon.
Piece build_piece(const MeatSpec& spec);

struct GeneratedScene {
  vision::Scene scene;
  Piece truth;
};

/// Renders the spec's piece. Throws Errc::Spec when it does not fit on the
/// board.
GeneratedScene generate_scene(const MeatSpec& spec, const Config& config);

/// Rasterizes pieces and marker squares (robot-frame centers) through the
/// camera: a pixel takes a material's color when its center lies inside it.
/// Pixels outside the board rectangle get the exterior color.
vision::Scene render_scene(std::span<const Piece> pieces, std::span<const Vec2> markers, const Config& config,
                           std::uint64_t noise_seed);

/// The board rectangle in robot coordinates.
Box board_in_robot_frame(const Config& config);

}  // namespace meatcut::harness
