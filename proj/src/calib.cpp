#include "meatcut/calib.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

namespace meatcut::calib {

namespace {

using Vector5d = Eigen::Matrix<double, 5, 1>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;

CalibrationParams from_vector(const Vector5d& x) {
  CalibrationParams p;
  p.theta0 = x[0];
  p.theta1 = x[1];
  p.theta2 = x[2];
  p.theta3 = x[3];
  p.theta4 = x[4];
  return p;
}

double sum_squared_error(const CalibrationParams& params, std::span<const MarkerPair> pairs) {
  const Eigen::Matrix2d t = params.transform();
  double total = 0.0;
  for (const auto& p : pairs) {
    const Eigen::Vector2d r = Eigen::Vector2d(params.theta3 + p.robot_xy.x, params.theta4 + p.robot_xy.y) -
                              t * Eigen::Vector2d(p.camera_xy.x, p.camera_xy.y);
    total += r.squaredNorm();
  }
  return total;
}

double objective(const Vector5d& x, std::span<const MarkerPair> pairs) {
  return sum_squared_error(from_vector(x), pairs);
}

// Residuals r_i = offset + p_R - T p_C and their Jacobian w.r.t. theta.
void linearize(const Vector5d& x, std::span<const MarkerPair> pairs, Eigen::VectorXd& r,
               Eigen::MatrixXd& J) {
  const double c = std::cos(x[0]);
  const double s = std::sin(x[0]);
  const Eigen::Vector2d u(c, s);    // first column direction
  const Eigen::Vector2d v(-s, c);   // second column direction
  const auto n = static_cast<Eigen::Index>(pairs.size());
  r.resize(2 * n);
  J.setZero(2 * n, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pr = pairs[static_cast<std::size_t>(i)];
    const double cx = pr.camera_xy.x;
    const double cy = pr.camera_xy.y;
    const Eigen::Vector2d mapped = x[1] * cx * u + x[2] * cy * v;
    r.segment<2>(2 * i) = Eigen::Vector2d(x[3] + pr.robot_xy.x, x[4] + pr.robot_xy.y) - mapped;
    // d(u)/d(theta0) = v, d(v)/d(theta0) = -u
    J.block<2, 1>(2 * i, 0) = -(x[1] * cx * v - x[2] * cy * u);
    J.block<2, 1>(2 * i, 1) = -cx * u;
    J.block<2, 1>(2 * i, 2) = -cy * v;
    J(2 * i, 3) = 1.0;
    J(2 * i + 1, 4) = 1.0;
  }
}

// With the angle fixed the problem is linear in scales and offset.
Vector5d linear_seed(double angle, std::span<const MarkerPair> pairs) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 4);
  Eigen::VectorXd b(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pr = pairs[static_cast<std::size_t>(i)];
    A(2 * i, 0) = pr.camera_xy.x * c;
    A(2 * i, 1) = -pr.camera_xy.y * s;
    A(2 * i, 2) = -1.0;
    A(2 * i + 1, 0) = pr.camera_xy.x * s;
    A(2 * i + 1, 1) = pr.camera_xy.y * c;
    A(2 * i + 1, 3) = -1.0;
    b[2 * i] = pr.robot_xy.x;
    b[2 * i + 1] = pr.robot_xy.y;
  }
  const Eigen::Vector4d sol = A.colPivHouseholderQr().solve(b);
  Vector5d x = Vector5d::Zero();
  x << angle, sol[0], sol[1], sol[2], sol[3];
  return x;
}

struct StartResult {
  Vector5d x = Vector5d::Zero();
  double f = std::numeric_limits<double>::infinity();
  bool converged = false;
};

StartResult levenberg_marquardt(Vector5d x, std::span<const MarkerPair> pairs,
                                const SolverOptions& options, std::vector<double>* history) {
  StartResult out;
  double f = objective(x, pairs);
  double lambda = 1e-3;
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  if (history) history->push_back(f);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (f == 0.0) {
      out.converged = true;
      break;
    }
    linearize(x, pairs, r, J);
    const Matrix5d H = J.transpose() * J;
    const Vector5d g = J.transpose() * r;
    Matrix5d damped = H;
    for (int k = 0; k < 5; ++k) damped(k, k) += lambda * std::max(H(k, k), 1e-300);
    const Vector5d step = damped.ldlt().solve(-g);
    if (!step.allFinite()) {
      lambda *= 10.0;
      continue;
    }
    const Vector5d candidate = x + step;
    const double f_new = objective(candidate, pairs);
    if (f_new <= f) {
      x = candidate;
      f = f_new;
      lambda = std::max(lambda / 10.0, 1e-15);
      if (history) history->push_back(f);
      if (step.norm() < options.step_tolerance) {
        out.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      // No representable descent direction left: we sit on the minimum.
      if (lambda > 1e20) {
        out.converged = true;
        break;
      }
    }
  }
  out.x = x;
  out.f = f;
  return out;
}

// Folds (theta0 + pi, -theta1, -theta2) onto positive scales; returns false
// for reflections, which have no positive-scale representation.
bool normalize(Vector5d& x) {
  if (x[1] < 0.0 && x[2] < 0.0) {
    x[0] += std::numbers::pi;
    x[1] = -x[1];
    x[2] = -x[2];
  }
  x[0] = wrap_angle(x[0]);
  return x[1] > 0.0 && x[2] > 0.0;
}

void check_geometry(std::span<const MarkerPair> pairs) {
  if (pairs.size() < 4) {
    throw Error(Errc::InsufficientData,
                "calibration needs at least 4 marker pairs, got " + std::to_string(pairs.size()));
  }
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pairs) {
    if (!std::isfinite(p.camera_xy.x) || !std::isfinite(p.camera_xy.y) || !std::isfinite(p.robot_xy.x) ||
        !std::isfinite(p.robot_xy.y)) {
      throw Error(Errc::InvalidArgument, "marker coordinates must be finite");
    }
    mean += Eigen::Vector2d(p.camera_xy.x, p.camera_xy.y);
  }
  mean /= static_cast<double>(pairs.size());
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto& p : pairs) {
    const Eigen::Vector2d d = Eigen::Vector2d(p.camera_xy.x, p.camera_xy.y) - mean;
    scatter += d * d.transpose();
  }
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(scatter).eigenvalues();
  if (!(ev[1] > 0.0) || ev[0] <= 1e-12 * ev[1]) {
    throw Error(Errc::RankDeficient, "camera points are collinear or coincident");
  }
}

}  // namespace

Eigen::Matrix2d CalibrationParams::transform() const {
  const double c = std::cos(theta0);
  const double s = std::sin(theta0);
  Eigen::Matrix2d t;
  t << theta1 * c, -theta2 * s, theta1 * s, theta2 * c;
  return t;
}

CalibrationParams fit_calibration(std::span<const MarkerPair> pairs, const SolverOptions& options,
                                  SolverTrace* trace) {
  check_geometry(pairs);

  constexpr std::array<double, 4> starts = {0.0, 0.5 * std::numbers::pi, std::numbers::pi,
                                            1.5 * std::numbers::pi};
  StartResult best;
  StartResult best_any;
  for (double angle : starts) {
    std::vector<double>* history = nullptr;
    if (trace) history = &trace->objective_per_start.emplace_back();
    StartResult result = levenberg_marquardt(linear_seed(angle, pairs), pairs, options, history);
    if (result.f < best_any.f) best_any = result;
    if (!result.converged || !normalize(result.x)) continue;
    if (result.f < best.f) best = result;
  }

  if (!std::isfinite(best.f)) {
    CalibrationParams fallback = from_vector(best_any.x);
    fallback.residual = std::sqrt(best_any.f);
    throw ConvergenceError("calibration did not converge to a positive-scale transform within " +
                               std::to_string(options.max_iterations) + " iterations",
                           fallback);
  }
  CalibrationParams out = from_vector(best.x);
  out.residual = calibration_residual(out, pairs);
  return out;
}

Vec2 pixel_to_robot(const CalibrationParams& params, Vec2 camera_xy) {
  const Eigen::Vector2d mapped = params.transform() * Eigen::Vector2d(camera_xy.x, camera_xy.y);
  return {mapped.x() - params.theta3, mapped.y() - params.theta4};
}

Vec2 robot_to_pixel(const CalibrationParams& params, Vec2 robot_xy) {
  const Eigen::Vector2d rhs(robot_xy.x + params.theta3, robot_xy.y + params.theta4);
  const Eigen::Vector2d px = params.transform().inverse() * rhs;
  return {px.x(), px.y()};
}

double calibration_residual(const CalibrationParams& params, std::span<const MarkerPair> pairs) {
  return std::sqrt(sum_squared_error(params, pairs));
}

std::vector<MarkerPair> read_marker_pairs(std::istream& in) {
  std::vector<MarkerPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    MarkerPair p;
    std::string extra;
    if (!(row >> p.robot_xy.x >> p.robot_xy.y >> p.camera_xy.x >> p.camera_xy.y) || (row >> extra)) {
      throw Error(Errc::Parse, "marker table line " + std::to_string(line_no) + ": expected 'rx ry cx cy'");
    }
    if (p.camera_xy.x < 0.0 || p.camera_xy.y < 0.0) {
      throw Error(Errc::Parse, "marker table line " + std::to_string(line_no) + ": negative pixel coordinate");
    }
    pairs.push_back(p);
  }
  return pairs;
}

void write_params(std::ostream& out, const CalibrationParams& params) {
  const auto old_precision = out.precision(17);
  out << "theta0=" << params.theta0 << '\n'
      << "theta1=" << params.theta1 << '\n'
      << "theta2=" << params.theta2 << '\n'
      << "theta3=" << params.theta3 << '\n'
      << "theta4=" << params.theta4 << '\n'
      << "residual=" << params.residual << '\n';
  out.precision(old_precision);
}

CalibrationParams read_params(std::istream& in) {
  std::map<std::string, double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::Parse, "params line " + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    try {
      values[trim(line.substr(0, eq))] = std::stod(trim(line.substr(eq + 1)));
    } catch (const std::exception&) {
      throw Error(Errc::Parse, "params line " + std::to_string(line_no) + ": bad number");
    }
  }
  auto get = [&](const char* key) {
    auto it = values.find(key);
    if (it == values.end()) throw Error(Errc::Parse, std::string("params missing key ") + key);
    return it->second;
  };
  CalibrationParams p;
  p.theta0 = get("theta0");
  p.theta1 = get("theta1");
  p.theta2 = get("theta2");
  p.theta3 = get("theta3");
  p.theta4 = get("theta4");
  if (auto it = values.find("residual"); it != values.end()) p.residual = it->second;
  return p;
}

}  // namespace meatcut::calib
