#pragma once

#include <memory>
#include <optional>
#include <string>

#include "meatcut/harness/config.hpp"
#include "meatcut/harness/scene_gen.hpp"

namespace meatcut::harness {

/// HTTP front end for collaborative point-to-point de-fatting.
///
///   GET  /health
///   GET  /scene         current raster (base64 PPM) and segmentation
///   POST /markers       {"markers":[{"x":..,"y":..},{"x":..,"y":..}]}, pixels
///   GET  /plan          straight cut between the markers
///   POST /execute       simulate the cut, persist a run, return the result
///   GET  /runs/{id}     persisted run log
///   POST /reset         {"seed": n} optional; fresh chop
///
/// Mutations run one at a time on an internal actor thread; reads serve the
/// latest immutable snapshot. Errors come back as {"error", "message"} with
/// 400 (malformed body), 404 (unknown run), 409 (missing markers or plan) or
/// 422 (invalid markers).
class Service {
 public:
  /// Starts from random_chop(config.seed) unless `spec` is given.
  explicit Service(Config config, std::optional<MeatSpec> spec = std::nullopt);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket; port 0 picks a free one. Returns the port.
  /// Throws Errc::Io when binding fails.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string base64_encode(const std::string& bytes);

}  // namespace meatcut::harness
