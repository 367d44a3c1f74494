#pragma once

#include <cmath>
#include <numbers>

#include "liepoisson/core.hpp"

// Exact kernel for so(3) / SO(3).
//
// Conventions used throughout the library:
//   hat(v) w = v x w,          pairing <mu, xi> = mu . xi,
//   Ad*_g mu = R^T mu          (right action: Ad*_{g2} Ad*_{g1} = Ad*_{g1 g2}),
//   ad*_xi mu = mu x xi,
//   dexpinv is the inverse right-trivialized tangent of exp.
// All functions are pure; branch switches below theta = 1e-4 (Taylor) keep
// the coefficient functions smooth through zero.

namespace liepoisson {

/// Rotation matrix in SO(3). `from_matrix` validates orthogonality and
/// orientation; everything produced by exp_so3 / composition stays well
/// inside those tolerances.
struct Rotation {
  Mat3 matrix = Mat3::Identity();

  static Rotation identity() { return {}; }

  static Rotation from_matrix(const Mat3& m, double tol = 1e-12) {
    const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
    const double det = m.determinant();
    if (!(ortho <= tol) || !(std::abs(det - 1.0) <= tol)) {
      throw std::domain_error("Rotation::from_matrix: matrix is not in SO(3), "
                              "orthogonality defect " + std::to_string(ortho));
    }
    return Rotation{m};
  }

  Vec3 operator*(const Vec3& v) const { return matrix * v; }
  Rotation operator*(const Rotation& o) const { return Rotation{matrix * o.matrix}; }
  Rotation transposed() const { return Rotation{matrix.transpose()}; }

  double orthogonality_defect() const {
    return (matrix.transpose() * matrix - Mat3::Identity()).norm();
  }
};

inline Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v[2], v[1],
       v[2], 0.0, -v[0],
      -v[1], v[0], 0.0;
  return m;
}

/// Inverse of hat. Requires ||M + M^T||_F <= 1e-10.
inline Vec3 vee(const Mat3& m) {
  const double skew_defect = (m + m.transpose()).norm();
  if (!(skew_defect <= 1e-10)) {
    throw std::domain_error("vee: matrix is not skew-symmetric, defect " +
                            std::to_string(skew_defect));
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

namespace detail {

inline constexpr double kSmallAngle = 1e-4;

// sin(t)/t and (1-cos(t))/t^2 with 4th-order Taylor branches.
inline double sinc(double t) {
  if (std::abs(t) < kSmallAngle) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

inline double cosc(double t) {
  if (std::abs(t) < kSmallAngle) {
    const double t2 = t * t;
    return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  }
  return (1.0 - std::cos(t)) / (t * t);
}

// c(t) = (1 - (t/2) cot(t/2)) / t^2, the coefficient of hat(xi)^2 in dexpinv.
// Series 1/12 + t^2/720 + t^4/30240 + t^6/1209600 + t^8/47900160; the last
// retained term is ~1e-19 at the branch point t = 0.25.
inline double dexpinv_c(double t) {
  const double t2 = t * t;
  if (std::abs(t) < 0.25) {
    return 1.0 / 12.0 +
           t2 * (1.0 / 720.0 +
                 t2 * (1.0 / 30240.0 +
                       t2 * (1.0 / 1209600.0 + t2 / 47900160.0)));
  }
  const double half = 0.5 * t;
  return (1.0 - half / std::tan(half)) / t2;
}

// c'(t)/t, smooth through zero; series t^0/360 + t^2/7560 + t^4/201600 + ...
inline double dexpinv_c_prime_over_t(double t) {
  const double t2 = t * t;
  if (std::abs(t) < 0.25) {
    return 1.0 / 360.0 +
           t2 * (1.0 / 7560.0 + t2 * (1.0 / 201600.0 + t2 / 5987520.0));
  }
  const double half = 0.5 * t;
  const double s = std::sin(half);
  const double cp = -2.0 / (t2 * t) + 1.0 / (4.0 * t * s * s) +
                    std::cos(half) / (2.0 * t2 * s);
  return cp / t;
}

inline void require_injectivity(double theta, const char* who) {
  if (!(theta < 2.0 * std::numbers::pi)) {
    throw std::domain_error(std::string(who) +
                            ": ||xi|| >= 2*pi, outside the injectivity radius");
  }
}

}  // namespace detail

/// Rodrigues formula: exp(hat(xi)) = I + sinc(t) hat(xi) + cosc(t) hat(xi)^2.
inline Rotation exp_so3(const Vec3& xi) {
  const double t = xi.norm();
  const Mat3 x = hat(xi);
  return Rotation{Mat3::Identity() + detail::sinc(t) * x +
                  detail::cosc(t) * (x * x)};
}

/// Matrix of dexpinv_xi: I - (1/2) hat(xi) + c(||xi||) hat(xi)^2.
inline Mat3 dexpinv_matrix(const Vec3& xi) {
  const double t = xi.norm();
  detail::require_injectivity(t, "dexpinv");
  const Mat3 x = hat(xi);
  return Mat3::Identity() - 0.5 * x + detail::dexpinv_c(t) * (x * x);
}

/// Inverse right-trivialized tangent of exp:
/// eta - (1/2) xi x eta + c(||xi||) xi x (xi x eta).
inline Vec3 dexpinv(const Vec3& xi, const Vec3& eta) {
  const double t = xi.norm();
  detail::require_injectivity(t, "dexpinv");
  const Vec3 a = xi.cross(eta);
  return eta - 0.5 * a + detail::dexpinv_c(t) * xi.cross(a);
}

/// Adjoint of dexpinv with respect to the dot-product pairing
/// (the transpose matrix): mu + (1/2) xi x mu + c(||xi||) xi x (xi x mu).
inline Vec3 dexpinv_star(const Vec3& xi, const Vec3& mu) {
  const double t = xi.norm();
  detail::require_injectivity(t, "dexpinv_star");
  const Vec3 a = xi.cross(mu);
  return mu + 0.5 * a + detail::dexpinv_c(t) * xi.cross(a);
}

/// Coadjoint action, vector form R^T mu; matrix form g^T hat(mu) g.
inline Vec3 Ad_star(const Rotation& g, const Vec3& mu) {
  return g.matrix.transpose() * mu;
}

/// Infinitesimal coadjoint action: <ad*_xi mu, eta> = <mu, xi x eta>.
inline Vec3 ad_star(const Vec3& xi, const Vec3& mu) { return mu.cross(xi); }

}  // namespace liepoisson
