#pragma once

#include <cmath>
#include <vector>

#include "liepoisson/core.hpp"
#include "liepoisson/lie3.hpp"
#include "liepoisson/poisson.hpp"

// The free rigid body on so(3)*, in both the Hamiltonian (vector) and the
// Lagrangian (trace) form, plus the high-accuracy reference oracle used by
// every order/accuracy study.
//
// Convention: mu' = mu x grad H(mu), i.e. Pi(mu) = hat(mu). This reproduces
// the component equations
//   mu1' = (I2-I3)/(I2 I3) mu2 mu3,   mu3' = (I1-I2)/(I1 I2) mu1 mu2,
// and forces mu2' = (I3-I1)/(I1 I3) mu1 mu3.

namespace liepoisson {

struct RigidBody {
  Vec3 inertia = Vec3(1.0, 2.0, 3.0);
  Mat3 trace_form = Mat3::Zero();  // J with (1/2) Tr(hat(w) J hat(w)^T) = (1/2) sum I_i w_i^2

  explicit RigidBody(const Vec3& principal_moments) : inertia(principal_moments) {
    if (!(inertia.minCoeff() > 0.0)) {
      throw std::domain_error("RigidBody: principal moments must be positive");
    }
    const double i1 = inertia[0], i2 = inertia[1], i3 = inertia[2];
    // J = (1/2) diag(-I1+I2+I3, I1-I2+I3, I1+I2-I3); positive semidefinite
    // exactly when the moments satisfy the triangle inequalities.
    const Vec3 j(0.5 * (-i1 + i2 + i3), 0.5 * (i1 - i2 + i3), 0.5 * (i1 + i2 - i3));
    if (!(j.minCoeff() >= 0.0)) {
      throw std::domain_error("RigidBody: moments violate the triangle inequality, "
                              "trace form would be indefinite");
    }
    trace_form = j.asDiagonal();
  }

  double hamiltonian(const Vec3& mu) const {
    return 0.5 * (mu[0] * mu[0] / inertia[0] + mu[1] * mu[1] / inertia[1] +
                  mu[2] * mu[2] / inertia[2]);
  }

  Vec3 grad_hamiltonian(const Vec3& mu) const {
    return Vec3(mu[0] / inertia[0], mu[1] / inertia[1], mu[2] / inertia[2]);
  }

  Mat3 hessian() const {
    return Vec3(1.0 / inertia[0], 1.0 / inertia[1], 1.0 / inertia[2]).asDiagonal();
  }

  double reduced_lagrangian(const Vec3& omega) const {
    return 0.5 * (inertia[0] * omega[0] * omega[0] + inertia[1] * omega[1] * omega[1] +
                  inertia[2] * omega[2] * omega[2]);
  }
};

/// Legendre transform mu_i = I_i xi_i and its inverse.
inline Vec3 legendre(const RigidBody& body, const Vec3& xi) {
  return xi.cwiseProduct(body.inertia);
}

inline Vec3 legendre_inverse(const RigidBody& body, const Vec3& mu) {
  return mu.cwiseQuotient(body.inertia);
}

inline PoissonSystem rigid_body_system(const RigidBody& body) {
  PoissonSystem sys;
  sys.dim = 3;
  sys.bivector = [](const VecX& z) { return MatX(hat(to_vec3(z))); };
  sys.hamiltonian = [body](const VecX& z) { return body.hamiltonian(to_vec3(z)); };
  sys.grad_hamiltonian = [body](const VecX& z) {
    return to_dynamic(body.grad_hamiltonian(to_vec3(z)));
  };
  sys.casimirs.push_back(
      {"C", [](const VecX& z) { return 0.5 * z.squaredNorm(); },
       [](const VecX& z) { return z; }});
  return sys;
}

inline PoissonSystem rigid_body_system(const Vec3& inertia) {
  return rigid_body_system(RigidBody(inertia));
}

/// Time grid, mu-space states, and per-step conservation diagnostics.
struct StepDiagnostics {
  double hamiltonian = 0.0;
  std::vector<double> casimirs;
  double orbit_radius = 0.0;  // ||mu||
};

struct Trajectory {
  std::vector<double> times;
  std::vector<VecX> states;
  std::vector<StepDiagnostics> diagnostics;
};

inline double first_integral_drift(const Trajectory& traj, const FirstIntegral& f) {
  return first_integral_drift(traj.states, f);
}

/// Ground truth for convergence studies: classical RK4 with the step count
/// doubled until two successive refinements agree to `tol`.
inline VecX reference_flow(const PoissonSystem& sys, const VecX& z0, double t,
                           double tol = 1e-12) {
  if (!(t >= 0.0)) throw std::domain_error("reference_flow: t must be nonnegative");
  if (t == 0.0) return z0;

  const auto rk4 = [&](int steps) {
    const double h = t / steps;
    VecX z = z0;
    for (int k = 0; k < steps; ++k) {
      const VecX k1 = hamiltonian_vf(sys, z);
      const VecX k2 = hamiltonian_vf(sys, z + 0.5 * h * k1);
      const VecX k3 = hamiltonian_vf(sys, z + 0.5 * h * k2);
      const VecX k4 = hamiltonian_vf(sys, z + h * k3);
      z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return z;
  };

  constexpr int kMaxSteps = 1 << 22;
  int n = std::max(16, static_cast<int>(std::ceil(t * 20.0)));
  VecX coarse = rk4(n);
  while (2 * n <= kMaxSteps) {
    n *= 2;
    VecX fine = rk4(n);
    if ((fine - coarse).norm() < tol) return fine;
    coarse = fine;
  }
  throw NonConvergenceError("reference_flow: refinement budget exhausted before "
                            "reaching tolerance",
                            /*residual=*/0.0, n);
}

}  // namespace liepoisson
