#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "meatcut/calib.hpp"
#include "meatcut/control.hpp"
#include "meatcut/planner.hpp"
#include "meatcut/scene.hpp"
#include "meatcut/vision.hpp"
#include "meatcut/workspace.hpp"

namespace meatcut::harness {

/// Fixed overhead camera. The default maps 1 px to 1 mm and puts the board
/// rectangle at robot x in [0.30, 0.80], y in [-0.20, 0.20].
struct CameraConfig {
  calib::CalibrationParams params{0.0, 0.001, 0.001, -0.28, 0.22, 0.0};
  int width = 540;
  int height = 440;
  vision::PixelRect board{20, 20, 500, 400};
};

struct RenderConfig {
  vision::Rgb meat{180, 40, 40};
  vision::Rgb fat{230, 230, 220};
  vision::Rgb marker{150, 40, 160};
  vision::Rgb board{10, 10, 10};
  vision::Rgb exterior{100, 100, 100};
  int jitter = 0;  ///< uniform per-channel noise amplitude
  int marker_size_px = 7;
};

enum class DefatMode { Trim, PointToPoint };

struct PipelineConfig {
  int n_slices = 9;
  double min_slice_width = 0.01;  ///< meters
  DefatMode defat = DefatMode::Trim;
  double squish_bound_px = 1.5;
  double interface_tol_px = 2.0;
  double cube_side = 0.03;  ///< meters
  double marker_push = 0.01;  ///< proctor markers sit this far beyond the interface ends, meters
  double min_fat_area_px = 20.0;  ///< smaller fat remnants are left on the slice
  std::pair<double, double> slice_weight_band_g{150.0, 250.0};
  std::pair<double, double> cube_side_band_cm{2.5, 3.5};
  int trajectory_decimation = 50;
};

struct ContactConfig {
  int n_trees = 500;
  std::vector<int> mtry_candidates{2, 3, 4, 5, 6, 7, 8};
  int probe_trees = 100;
  double train_fraction = 0.6;
  bool global_standardization = false;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
};

struct Config {
  workspace::SafeRegion region{0.29, 0.81, -0.21, 0.21, 0.0, 0.25};
  CameraConfig camera;
  RenderConfig render;
  vision::SegmentationOptions segmentation;
  planner::CutMotionProfile motion;
  control::ControllerConfig controller;
  control::PlantModel plant;
  PipelineConfig pipeline;
  ContactConfig contact;
  ServiceConfig service;
  std::uint64_t seed = 1;
  std::filesystem::path run_dir = "runs";

  /// Throws Errc::InvalidArgument (or the module's own error) on any invalid
  /// section.
  void validate() const;
};

nlohmann::json to_json(const Config& config);

/// Sections and keys absent from `j` keep their defaults; unknown sections or
/// keys raise Errc::Parse so typos do not pass silently.
Config config_from_json(const nlohmann::json& j);

Config load_config(const std::filesystem::path& path);

}  // namespace meatcut::harness
