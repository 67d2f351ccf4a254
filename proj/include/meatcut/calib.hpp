#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "meatcut/error.hpp"
#include "meatcut/geometry.hpp"

namespace meatcut::calib {

/// One calibration marker seen in both frames.
struct MarkerPair {
  Vec2 robot_xy;   ///< meters, robot base frame
  Vec2 camera_xy;  ///< pixels
};

/// Scaled-orthogonal camera-to-robot transform.
///
/// The transform matrix is
///
///     T = [ theta1*cos(theta0)  -theta2*sin(theta0) ]
///         [ theta1*sin(theta0)   theta2*cos(theta0) ]
///
/// whose columns are orthogonal for any parameter values, and the offset is
/// (theta3, theta4). A camera point maps to the robot frame as T*p_C - offset.
struct CalibrationParams {
  double theta0 = 0.0;  ///< rotation, radians in (-pi, pi]
  double theta1 = 1.0;  ///< camera-x scale, meters per pixel
  double theta2 = 1.0;  ///< camera-y scale, meters per pixel
  double theta3 = 0.0;  ///< offset x, meters
  double theta4 = 0.0;  ///< offset y, meters
  double residual = 0.0;  ///< sqrt of the final objective, meters

  Eigen::Matrix2d transform() const;
  Vec2 offset() const { return {theta3, theta4}; }
};

struct SolverOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;
};

/// Squared-error objective after every accepted iteration, one series per
/// start.
struct SolverTrace {
  std::vector<std::vector<double>> objective_per_start;
};

/// Raised when no start converges within the iteration budget. Carries the
/// lowest-objective iterate seen.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, CalibrationParams best)
      : Error(Errc::NoConvergence, what), best_(best) {}
  const CalibrationParams& best_iterate() const noexcept { return best_; }

 private:
  CalibrationParams best_;
};

/// Fits the transform to at least four marker pairs by minimizing
/// sum_i |offset + p_R^i - T*p_C^i|^2 (squared norms).
///
/// Damped Gauss-Newton (Levenberg-Marquardt) from four rotation starts
/// {0, pi/2, pi, 3pi/2}; each start is seeded by the linear least-squares
/// solution for the scales and offset at that angle. The lowest-residual
/// start with positive scales wins.
CalibrationParams fit_calibration(std::span<const MarkerPair> pairs,
                                  const SolverOptions& options = {},
                                  SolverTrace* trace = nullptr);

Vec2 pixel_to_robot(const CalibrationParams& params, Vec2 camera_xy);

/// Inverse of pixel_to_robot; used to render synthetic scenes.
Vec2 robot_to_pixel(const CalibrationParams& params, Vec2 robot_xy);

/// Root of the summed squared marker errors under `params`, in meters.
/// Zero iff the fit is exact.
double calibration_residual(const CalibrationParams& params, std::span<const MarkerPair> pairs);

// Marker table: one pair per line "rx ry cx cy", '#' starts a comment.
std::vector<MarkerPair> read_marker_pairs(std::istream& in);

// key=value text, one parameter per line.
void write_params(std::ostream& out, const CalibrationParams& params);
CalibrationParams read_params(std::istream& in);

}  // namespace meatcut::calib
