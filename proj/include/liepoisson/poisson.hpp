#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "liepoisson/core.hpp"
#include "liepoisson/solvers.hpp"

// Generic finite-dimensional Poisson structures on R^m and the Poisson-map
// defect diagnostic. The bivector is supplied as a black box z -> Pi(z);
// structural properties (skew-symmetry, Jacobi identity) are verified by
// sampling, not symbolically.

namespace liepoisson {

struct FirstIntegral {
  std::string name;
  std::function<double(const VecX&)> value;
  std::function<VecX(const VecX&)> gradient;
};

/// dynamics: z' = Pi(z) grad H(z)
struct PoissonSystem {
  int dim = 0;
  std::function<MatX(const VecX&)> bivector;
  std::function<double(const VecX&)> hamiltonian;
  std::function<VecX(const VecX&)> grad_hamiltonian;
  std::vector<FirstIntegral> casimirs;
};

/// Single-step integrator contract. The internal state may differ from the
/// coalgebra/phase point the diagnostics consume (e.g. the collective scheme
/// carries a point of the symplectic realization): `lift` embeds mu into the
/// internal state once per trajectory, `advance` steps it, `read_out` maps it
/// back. For plain R^m schemes all three are trivial.
struct StepMap {
  std::string name;
  PoissonSystem system;
  SolverSettings settings;
  int state_dim = 0;
  std::function<VecX(const VecX&)> lift;
  std::function<VecX(const VecX&, double)> advance;
  std::function<VecX(const VecX&)> read_out;

  /// One step as a map on the diagnostic space.
  VecX step(const VecX& z, double h) const { return read_out(advance(lift(z), h)); }
};

inline StepMap make_plain_step_map(std::string name, const PoissonSystem& sys,
                                   const SolverSettings& settings,
                                   std::function<VecX(const VecX&, double)> stepper) {
  StepMap m;
  m.name = std::move(name);
  m.system = sys;
  m.settings = settings;
  m.state_dim = sys.dim;
  m.lift = [](const VecX& z) { return z; };
  m.read_out = [](const VecX& z) { return z; };
  m.advance = std::move(stepper);
  return m;
}

inline VecX hamiltonian_vf(const PoissonSystem& sys, const VecX& z) {
  if (!z.allFinite()) throw std::domain_error("hamiltonian_vf: non-finite state");
  return sys.bivector(z) * sys.grad_hamiltonian(z);
}

/// Central-difference Jacobian of f at z; entry error O(step^2) for smooth f.
inline MatX jacobian_fd(const std::function<VecX(const VecX&)>& f, const VecX& z,
                        double step = 1e-6) {
  if (!(step > 0.0)) throw std::domain_error("jacobian_fd: step must be positive");
  const auto n = z.size();
  VecX zp = z, zm = z;
  VecX f0 = f(z);
  MatX J(f0.size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    zp[j] += step;
    zm[j] -= step;
    J.col(j) = (f(zp) - f(zm)) / (2.0 * step);
    zp[j] = z[j];
    zm[j] = z[j];
  }
  return J;
}

/// || Dphi Pi(z) Dphi^T - Pi(phi(z)) ||_F with Dphi from central differences.
/// Zero (to the finite-difference floor) iff the step map is Poisson at z.
inline double poisson_defect(const StepMap& map, const VecX& z, double h,
                             double fd_step = 1e-6) {
  const auto phi = [&](const VecX& x) { return map.step(x, h); };
  const MatX D = jacobian_fd(phi, z, fd_step);
  const MatX pi_before = map.system.bivector(z);
  const MatX pi_after = map.system.bivector(phi(z));
  return (D * pi_before * D.transpose() - pi_after).norm();
}

/// max_k |f(z_k) - f(z_0)| over a state sequence.
inline double first_integral_drift(const std::vector<VecX>& states,
                                   const FirstIntegral& f) {
  if (states.empty()) throw std::domain_error("first_integral_drift: empty trajectory");
  const double f0 = f.value(states.front());
  double drift = 0.0;
  for (const VecX& z : states) drift = std::max(drift, std::abs(f.value(z) - f0));
  return drift;
}

/// {f, g}(z) = grad f^T Pi(z) grad g.
inline double poisson_bracket(const PoissonSystem& sys, const FirstIntegral& f,
                              const FirstIntegral& g, const VecX& z) {
  return f.gradient(z).dot(sys.bivector(z) * g.gradient(z));
}

/// Max component of the Jacobi-identity residual
/// sum_l (Pi^{il} d_l Pi^{jk} + Pi^{kl} d_l Pi^{ij} + Pi^{jl} d_l Pi^{ki})
/// with the bivector derivatives taken by central differences.
inline double jacobi_residual_fd(const PoissonSystem& sys, const VecX& z,
                                 double step = 1e-6) {
  const int m = sys.dim;
  std::vector<MatX> dPi(m);
  VecX zp = z, zm = z;
  for (int l = 0; l < m; ++l) {
    zp[l] += step;
    zm[l] -= step;
    dPi[l] = (sys.bivector(zp) - sys.bivector(zm)) / (2.0 * step);
    zp[l] = z[l];
    zm[l] = z[l];
  }
  const MatX pi = sys.bivector(z);
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        double r = 0.0;
        for (int l = 0; l < m; ++l) {
          r += pi(i, l) * dPi[l](j, k) + pi(k, l) * dPi[l](i, j) +
               pi(j, l) * dPi[l](k, i);
        }
        worst = std::max(worst, std::abs(r));
      }
    }
  }
  return worst;
}

}  // namespace liepoisson
