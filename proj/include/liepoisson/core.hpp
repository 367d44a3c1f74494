#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace liepoisson {

inline constexpr const char* kVersion = "0.1.0";

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// An implicit solve exhausted its iteration budget. Carries the smallest
/// residual seen so the caller can tell "almost there" from "diverged".
struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(const std::string& what, double residual_, int iterations_)
      : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
  double residual = 0.0;
  int iterations = 0;
};

/// Newton (or an equation system inside a scheme) met a Jacobian whose
/// condition estimate exceeds 1e12.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A chart-based scheme was asked to leave the injectivity region of the
/// exponential chart (or violated the step-size guard).
struct ChartRadiusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid study configuration (unknown integrator/model, bad flag values,
/// mismatched compare configs).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A study could not produce its figure of merit, e.g. a slope fit with
/// fewer than three points above the error floor.
struct StudyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline VecX to_dynamic(const Vec3& v) {
  VecX r(3);
  r << v[0], v[1], v[2];
  return r;
}

inline Vec3 to_vec3(const VecX& v) { return Vec3(v[0], v[1], v[2]); }

}  // namespace liepoisson
