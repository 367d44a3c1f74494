#pragma once

// Test-only oracles, independent of the library's implementation paths:
// a scaling-and-squaring matrix exponential, the Bernoulli series for
// dexpinv, a finite-difference dexp, and a generic RK4-with-doubling ODE
// reference for embedded systems.

#include <cmath>
#include <functional>
#include <random>

#include "liepoisson/core.hpp"
#include "liepoisson/lie3.hpp"
#include "liepoisson/poisson.hpp"

namespace oracles {

using liepoisson::Mat3;
using liepoisson::Vec3;
using liepoisson::VecX;

/// Truncated matrix exponential with scaling and squaring.
inline Mat3 expm_series(const Mat3& m) {
  int squarings = 0;
  Mat3 a = m;
  while (a.norm() > 0.5) {
    a *= 0.5;
    ++squarings;
  }
  Mat3 sum = Mat3::Identity();
  Mat3 term = Mat3::Identity();
  for (int k = 1; k <= 16; ++k) {
    term = (term * a) / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// dexpinv via the Bernoulli series sum_{n<=8} (B_n / n!) ad_xi^n(eta);
/// accurate to well below 1e-9 for ||xi|| <= 0.5.
inline Vec3 dexpinv_bernoulli(const Vec3& xi, const Vec3& eta) {
  constexpr double bernoulli[9] = {1.0,        -1.0 / 2.0, 1.0 / 6.0,
                                   0.0,        -1.0 / 30.0, 0.0,
                                   1.0 / 42.0, 0.0,        -1.0 / 30.0};
  Vec3 sum = Vec3::Zero();
  Vec3 ad_power = eta;  // ad_xi^n(eta)
  double factorial = 1.0;
  for (int n = 0; n <= 8; ++n) {
    if (n > 0) {
      ad_power = xi.cross(ad_power);
      factorial *= n;
    }
    sum += (bernoulli[n] / factorial) * ad_power;
  }
  return sum;
}

/// Right-trivialized tangent of exp by central differences:
/// dexp_xi(eta) = vee( d/de exp(xi + e eta)|_0 * exp(xi)^T ).
inline Vec3 dexp_fd(const Vec3& xi, const Vec3& eta, double eps = 1e-6) {
  const Mat3 plus = liepoisson::exp_so3(xi + eps * eta).matrix;
  const Mat3 minus = liepoisson::exp_so3(xi - eps * eta).matrix;
  const Mat3 d = ((plus - minus) / (2.0 * eps)) * liepoisson::exp_so3(xi).matrix.transpose();
  return liepoisson::vee(0.5 * (d - d.transpose()));
}

/// Generic RK4 reference with step doubling for plain ODEs x' = f(x).
inline VecX ode_reference(const std::function<VecX(const VecX&)>& f, const VecX& x0,
                          double t, double tol) {
  const auto rk4 = [&](int steps) {
    const double h = t / steps;
    VecX x = x0;
    for (int k = 0; k < steps; ++k) {
      const VecX k1 = f(x);
      const VecX k2 = f(x + 0.5 * h * k1);
      const VecX k3 = f(x + 0.5 * h * k2);
      const VecX k4 = f(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
  };
  int n = 16;
  VecX coarse = rk4(n);
  while (n < (1 << 22)) {
    n *= 2;
    VecX fine = rk4(n);
    if ((fine - coarse).norm() < tol) return fine;
    coarse = fine;
  }
  return coarse;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  Vec3 vec3(double scale) {
    return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale));
  }
  VecX vecx(int n, double scale) {
    VecX v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-scale, scale);
    return v;
  }
};

/// 2D harmonic oscillator with the constant canonical structure.
inline liepoisson::PoissonSystem harmonic_oscillator() {
  liepoisson::PoissonSystem sys;
  sys.dim = 2;
  liepoisson::MatX pi(2, 2);
  pi << 0.0, 1.0, -1.0, 0.0;
  sys.bivector = [pi](const VecX&) { return pi; };
  sys.hamiltonian = [](const VecX& z) { return 0.5 * z.squaredNorm(); };
  sys.grad_hamiltonian = [](const VecX& z) { return z; };
  return sys;
}

/// Smooth non-polynomial Hamiltonian on so(3)* for quadrature tests.
inline liepoisson::PoissonSystem transcendental_so3_system() {
  liepoisson::PoissonSystem sys;
  sys.dim = 3;
  sys.bivector = [](const VecX& z) {
    return liepoisson::MatX(liepoisson::hat(liepoisson::to_vec3(z)));
  };
  sys.hamiltonian = [](const VecX& z) {
    return std::cos(z[0]) + 0.25 * z[1] * z[1] * z[1] * z[1] + std::exp(0.3 * z[2]);
  };
  sys.grad_hamiltonian = [](const VecX& z) {
    VecX g(3);
    g << -std::sin(z[0]), z[1] * z[1] * z[1], 0.3 * std::exp(0.3 * z[2]);
    return g;
  };
  return sys;
}

}  // namespace oracles
