#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "liepoisson/core.hpp"

// Implicit-equation solvers shared by every implicit integrator step.
//
// Both solvers return an iterate whose residual meets `tolerance` or throw
// NonConvergenceError; a silently bad value is never returned. After the
// residual first meets tolerance, up to two further iterations run and the
// best-residual iterate is kept, which drives implicit maps close to the
// roundoff floor (finite-difference probes of a step map need the solve
// error to sit well below the probe step).

namespace liepoisson {

struct SolverSettings {
  double tolerance = 1e-12;   // residual norm bound on the returned iterate
  int max_iterations = 50;
  double fd_step = 1e-7;      // Newton finite-difference Jacobian step
  double damping = 1.0;       // in (0, 1]
};

struct SolveResult {
  VecX x;
  int iterations = 0;   // iterations until the residual first met tolerance
  double residual = 0.0;
};

using VectorMap = std::function<VecX(const VecX&)>;

/// Damped fixed-point iteration for x = g(x).
inline SolveResult fixed_point(const VectorMap& g, const VecX& x0,
                               const SolverSettings& s = {}) {
  VecX x = x0;
  VecX best_x = x0;
  double best_r = std::numeric_limits<double>::infinity();
  int first_hit = -1;
  int it = 0;
  for (;; ++it) {
    const VecX gx = g(x);
    const double r = (x - gx).norm();
    if (r < best_r) {
      best_r = r;
      best_x = x;
    }
    if (first_hit < 0 && r <= s.tolerance) first_hit = it;
    const bool refined = first_hit >= 0 && it >= first_hit + 2;
    if (refined || it >= s.max_iterations) break;
    x += s.damping * (gx - x);
  }
  if (first_hit < 0) {
    throw NonConvergenceError("fixed_point: residual " + std::to_string(best_r) +
                                  " after " + std::to_string(it) + " iterations",
                              best_r, it);
  }
  return {best_x, first_hit, best_r};
}

/// Newton iteration for F(x) = 0 with central-difference Jacobian.
/// Throws SingularMatrixError when the Jacobian condition estimate
/// exceeds 1e12.
inline SolveResult newton_fd(const VectorMap& F, const VecX& x0,
                             const SolverSettings& s = {}) {
  const auto n = x0.size();
  VecX x = x0;
  VecX best_x = x0;
  double best_r = std::numeric_limits<double>::infinity();
  int first_hit = -1;
  int it = 0;
  for (;; ++it) {
    const VecX Fx = F(x);
    const double r = Fx.norm();
    if (r < best_r) {
      best_r = r;
      best_x = x;
    }
    if (first_hit < 0 && r <= s.tolerance) first_hit = it;
    const bool refined = first_hit >= 0 && it >= first_hit + 1;
    if (refined || it >= s.max_iterations) break;

    MatX J(n, n);
    VecX xp = x, xm = x;
    for (Eigen::Index j = 0; j < n; ++j) {
      xp[j] += s.fd_step;
      xm[j] -= s.fd_step;
      J.col(j) = (F(xp) - F(xm)) / (2.0 * s.fd_step);
      xp[j] = x[j];
      xm[j] = x[j];
    }
    Eigen::FullPivLU<MatX> lu(J);
    if (!(lu.rcond() > 1e-12)) {
      throw SingularMatrixError("newton_fd: Jacobian condition estimate exceeds 1e12");
    }
    x += s.damping * lu.solve(-Fx);
  }
  if (first_hit < 0) {
    throw NonConvergenceError("newton_fd: residual " + std::to_string(best_r) +
                                  " after " + std::to_string(it) + " iterations",
                              best_r, it);
  }
  return {best_x, first_hit, best_r};
}

}  // namespace liepoisson
