// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nfbeam {

using cdouble = std::complex<double>;
using ComplexVec = Eigen::VectorXcd;
using ComplexMat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 2.99792458e8;

/// Full motion state of the user: planar position (m) and velocity (m/s).
struct MotionState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  Vec2 position() const { return {x, y}; }
  Vec2 velocity() const { return {vx, vy}; }
  Vec4 vector() const { return {x, y, vx, vy}; }

  static MotionState from_vector(const Vec4& eta) {
    return {eta(0), eta(1), eta(2), eta(3)};
  }
  static MotionState from_parts(const Vec2& p, const Vec2& v) {
    return {p.x(), p.y(), v.x(), v.y()};
  }

  friend bool operator==(const MotionState&, const MotionState&) = default;
};

/// Raised when the user position coincides with an antenna, the array
/// origin, or (for the absolute projection convention) an antenna abscissa.
class DegeneratePositionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration value; `field` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)), message_(message) {}
  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }

 private:
  std::string field_;
  std::string message_;
};

}  // namespace nfbeam
