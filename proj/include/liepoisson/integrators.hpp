#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "liepoisson/core.hpp"
#include "liepoisson/lie3.hpp"
#include "liepoisson/models.hpp"
#include "liepoisson/poisson.hpp"
#include "liepoisson/solvers.hpp"

// The integrator families, each packaged as a StepMap:
//
//   explicit_euler_step      z' = z + h Pi(z) grad H(z)                (baseline)
//   midpoint_step            implicit midpoint on R^m
//   discrete_gradient_step   (z'-z)/h = Pi((z+z')/2) dgrad H(z,z')     (energy-exact)
//   discrete_lp_step         mu' = Ad*_{g(mu)} mu                      (generic carrier)
//   discrete_ep_rigid_step   Moser-Veselov trace-form rigid body
//   retraction_lp_step       exp-chart coisotropic scheme, Hamiltonian/Lagrangian
//   collective_step          symplectic midpoint on the Hopf realization T*R^2
//   hj_generating_step       truncated Hamilton-Jacobi generating function
//
// Every scheme whose update ends in mu' = Ad*_g mu preserves ||mu|| exactly
// (coadjoint-orbit conservation); the harness measures the rest.

namespace liepoisson {

using HopfLift = Vec4;  // (q1, q2, p1, p2) on T*R^2

enum class RetractionVariant { hamiltonian, lagrangian };
enum class RetractionScaling { half, full };
enum class DiscreteGradientKind { mean_value, midpoint };

namespace detail {

// Step-size guard for chart-based schemes: stay inside the exp injectivity
// radius with a wide margin.
inline void require_step_guard(double h, double grad_norm, const char* scheme) {
  if (h * grad_norm > 1.0) {
    throw ChartRadiusError(std::string(scheme) +
                           ": step guard h*||grad H|| > 1 violated");
  }
}

inline void require_chart(const Vec3& xi, const char* scheme) {
  if (!(xi.norm() < 2.0 * std::numbers::pi * (1.0 - 1e-9))) {
    throw ChartRadiusError(std::string(scheme) +
                           ": exponential-chart argument reached the injectivity radius");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// R^m schemes

inline StepMap explicit_euler_step(const PoissonSystem& sys, SolverSettings s = {}) {
  auto stepper = [sys](const VecX& z, double h) -> VecX {
    return z + h * hamiltonian_vf(sys, z);
  };
  return make_plain_step_map("euler", sys, s, stepper);
}

/// (z'-z)/h = Pi((z+z')/2) grad H((z+z')/2), solved by damped fixed point
/// from an explicit-Euler predictor.
inline StepMap midpoint_step(const PoissonSystem& sys, SolverSettings s = {}) {
  auto stepper = [sys, s](const VecX& z, double h) -> VecX {
    const auto g = [&](const VecX& zn) -> VecX {
      const VecX mid = 0.5 * (z + zn);
      return z + h * (sys.bivector(mid) * sys.grad_hamiltonian(mid));
    };
    const VecX predictor = z + h * hamiltonian_vf(sys, z);
    return fixed_point(g, predictor, s).x;
  };
  return make_plain_step_map("midpoint", sys, s, stepper);
}

// ---------------------------------------------------------------------------
// Discrete gradients

namespace detail {

// Gauss-Legendre rules on [-1,1]; mapped to [0,1] at the call site.
inline constexpr std::array<std::array<double, 2>, 4> kGauss8 = {{
    {0.18343464249564980, 0.36268378337836198},
    {0.52553240991632899, 0.31370664587788729},
    {0.79666647741362674, 0.22238103445337447},
    {0.96028985649753623, 0.10122853629037626},
}};

inline constexpr std::array<std::array<double, 2>, 8> kGauss16 = {{
    {0.09501250983763744, 0.18945061045506850},
    {0.28160355077925891, 0.18260341504492359},
    {0.45801677765722739, 0.16915651939500254},
    {0.61787624440264375, 0.14959598881657673},
    {0.75540440835500303, 0.12462897125553387},
    {0.86563120238783174, 0.09515851168249278},
    {0.94457502307323258, 0.06225352393864789},
    {0.98940093499164993, 0.02715245941175409},
}};

template <std::size_t N>
VecX segment_gradient_average(const PoissonSystem& sys, const VecX& x, const VecX& xn,
                              const std::array<std::array<double, 2>, N>& rule) {
  VecX acc = VecX::Zero(x.size());
  for (const auto& [node, weight] : rule) {
    for (const double sign : {-1.0, 1.0}) {
      const double t = 0.5 * (1.0 + sign * node);  // node on [0,1]
      acc += (0.5 * weight) * sys.grad_hamiltonian((1.0 - t) * x + t * xn);
    }
  }
  return acc;
}

}  // namespace detail

/// Mean value discrete gradient: integral_0^1 grad H((1-s)x + s x') ds by
/// Gauss-Legendre quadrature (8 or 16 points).
inline VecX mean_value_discrete_gradient(const PoissonSystem& sys, const VecX& x,
                                         const VecX& xn, int quadrature_points = 8) {
  if (quadrature_points == 8) {
    return detail::segment_gradient_average(sys, x, xn, detail::kGauss8);
  }
  if (quadrature_points == 16) {
    return detail::segment_gradient_average(sys, x, xn, detail::kGauss16);
  }
  throw std::domain_error("mean_value_discrete_gradient: quadrature order must be 8 or 16");
}

/// Midpoint discrete gradient; the x' = x limit is grad H(x).
inline VecX midpoint_discrete_gradient(const PoissonSystem& sys, const VecX& x,
                                       const VecX& xn) {
  const VecX mid = 0.5 * (x + xn);
  const VecX gm = sys.grad_hamiltonian(mid);
  const VecX d = xn - x;
  const double dd = d.squaredNorm();
  if (dd < 1e-60) return gm;
  const double correction = sys.hamiltonian(xn) - sys.hamiltonian(x) - gm.dot(d);
  return gm + (correction / dd) * d;
}

inline VecX discrete_gradient(const PoissonSystem& sys, DiscreteGradientKind kind,
                              const VecX& x, const VecX& xn) {
  return kind == DiscreteGradientKind::mean_value
             ? mean_value_discrete_gradient(sys, x, xn)
             : midpoint_discrete_gradient(sys, x, xn);
}

/// Energy-preserving scheme (x'-x)/h = Pi~(x,x',h) dgrad H(x,x') with the
/// midpoint bivector approximation Pi~ = Pi((x+x')/2).
inline StepMap discrete_gradient_step(const PoissonSystem& sys, DiscreteGradientKind kind,
                                      SolverSettings s = {}) {
  auto stepper = [sys, kind, s](const VecX& z, double h) -> VecX {
    const auto g = [&](const VecX& zn) -> VecX {
      const VecX mid = 0.5 * (z + zn);
      return z + h * (sys.bivector(mid) * discrete_gradient(sys, kind, z, zn));
    };
    const VecX predictor = z + h * hamiltonian_vf(sys, z);
    return fixed_point(g, predictor, s).x;
  };
  const char* name = kind == DiscreteGradientKind::mean_value ? "dgrad-mean" : "dgrad-mid";
  return make_plain_step_map(name, sys, s, stepper);
}

// ---------------------------------------------------------------------------
// Ad*-form carriers on so(3)*

using GroupFromMomentum = std::function<Rotation(const Vec3& mu, double h)>;

/// Generic discrete Lie-Poisson update mu' = Ad*_{g(mu)} mu. Any discrete
/// Legendre pair plugs in through g_of_mu; the orbit ||mu|| is preserved by
/// construction.
inline StepMap discrete_lp_step(const PoissonSystem& sys, GroupFromMomentum g_of_mu,
                                std::string name = "dlp", SolverSettings s = {}) {
  auto stepper = [g_of_mu](const VecX& z, double h) -> VecX {
    const Vec3 mu = to_vec3(z);
    return to_dynamic(Ad_star(g_of_mu(mu, h), mu));
  };
  return make_plain_step_map(std::move(name), sys, s, stepper);
}

/// Registered "dlp" carrier: g(mu) = exp(h grad H(mu)).
inline StepMap lie_euler_lp_step(const RigidBody& body, SolverSettings s = {}) {
  auto g_of_mu = [body](const Vec3& mu, double h) {
    const Vec3 omega = body.grad_hamiltonian(mu);
    detail::require_step_guard(h, omega.norm(), "dlp");
    return exp_so3(h * omega);
  };
  return discrete_lp_step(rigid_body_system(body), g_of_mu, "dlp", s);
}

// ---------------------------------------------------------------------------
// Discrete Euler-Poincare rigid body (trace-form discrete Lagrangian)

/// Momentum matrix readout J g^T - g J; skew by construction.
inline Mat3 dep_momentum_matrix(const RigidBody& body, const Rotation& g) {
  return body.trace_form * g.matrix.transpose() - g.matrix * body.trace_form;
}

/// Solve J g + J g1^T = g^T J + g1 J for g1 = g * exp(eta), Newton on eta.
inline Rotation dep_next_relative_rotation(const RigidBody& body, const Rotation& g,
                                           const SolverSettings& s = {}) {
  const Mat3 lhs = body.trace_form * g.matrix - g.matrix.transpose() * body.trace_form;
  const auto residual = [&](const VecX& eta) -> VecX {
    const Mat3 g1 = g.matrix * exp_so3(to_vec3(eta)).matrix;
    const Mat3 m = lhs + body.trace_form * g1.transpose() - g1 * body.trace_form;
    return to_dynamic(vee(0.5 * (m - m.transpose())));
  };
  const VecX eta = newton_fd(residual, VecX::Zero(3), s).x;
  return g * exp_so3(to_vec3(eta));
}

/// Find the relative rotation g = exp(eta) whose momentum readout matches
/// -h mu, i.e. vee(J g^T - g J) = -h mu. Expanding the readout gives
/// vee(J g^T - g J) = -h I Omega + O(h^2), so the explicit-Euler-type
/// predictor is eta0 = h I^{-1} mu.
inline Rotation dep_group_from_momentum(const RigidBody& body, const Vec3& mu, double h,
                                        const SolverSettings& s = {}) {
  detail::require_step_guard(h, body.grad_hamiltonian(mu).norm(), "dep-rigid");
  const auto residual = [&](const VecX& eta) -> VecX {
    const Mat3 m = dep_momentum_matrix(body, exp_so3(to_vec3(eta)));
    return to_dynamic(vee(0.5 * (m - m.transpose())) + h * mu);
  };
  const VecX eta0 = to_dynamic(h * legendre_inverse(body, mu));
  const VecX eta = newton_fd(residual, eta0, s).x;
  return exp_so3(to_vec3(eta));
}

/// mu-space carrier of the discrete Euler-Poincare equations: match the
/// readout, then push with Ad*. Iterating this map is algebraically identical
/// to the (g_k, g_{k+1}) recursion, so mu_hat_{k+1} = g_k^T mu_hat_k g_k
/// holds along trajectories up to solver tolerance.
inline StepMap discrete_ep_rigid_step(const RigidBody& body, SolverSettings s = {}) {
  auto stepper = [body, s](const VecX& z, double h) -> VecX {
    const Vec3 mu = to_vec3(z);
    const Rotation g = dep_group_from_momentum(body, mu, h, s);
    return to_dynamic(Ad_star(g, mu));
  };
  return make_plain_step_map("dep-rigid", rigid_body_system(body), s, stepper);
}

// ---------------------------------------------------------------------------
// Retraction-based coisotropic scheme (exp chart)
//
// Hamiltonian form, `full` scaling:
//   solve  (dexpinv_{h grad H(m)})* m = mu_k   for the auxiliary m,
//   g = exp(h grad H(m)),   mu_{k+1} = Ad*_g mu_k.
// The `half` scaling keeps the literal (h/2) prefactor on mu_k and the
// exp(h xi / 2) retraction; the auxiliary variable then scales like
// (2/h) mu_k and the map is h-independent. Both are exactly Poisson; the
// harness measures their orders. The Lagrangian form replaces the unknown by
// xi with m = delta l / delta xi = I xi; for this quadratic body the two
// forms define the same map.

inline StepMap retraction_lp_step(const RigidBody& body, RetractionVariant variant,
                                  RetractionScaling scaling, SolverSettings s = {}) {
  auto stepper = [body, variant, scaling, s](const VecX& z, double h) -> VecX {
    const Vec3 mu = to_vec3(z);
    detail::require_step_guard(h, body.grad_hamiltonian(mu).norm(), "retraction");
    const double chart = scaling == RetractionScaling::half ? 0.5 * h : h;
    const double prefactor = scaling == RetractionScaling::half ? 0.5 * h : 1.0;

    // unknown -> (chart velocity xi, dual argument m)
    const auto split = [&](const Vec3& u) {
      return variant == RetractionVariant::hamiltonian
                 ? std::pair<Vec3, Vec3>{body.grad_hamiltonian(u), u}
                 : std::pair<Vec3, Vec3>{u, legendre(body, u)};
    };
    const auto residual = [&](const VecX& uz) -> VecX {
      const auto [xi, m] = split(to_vec3(uz));
      detail::require_chart(chart * xi, "retraction");
      return to_dynamic(prefactor * dexpinv_star(chart * xi, m) - mu);
    };

    Vec3 guess = variant == RetractionVariant::hamiltonian ? mu : legendre_inverse(body, mu);
    if (scaling == RetractionScaling::half) guess *= 2.0 / h;
    const Vec3 u = to_vec3(newton_fd(residual, to_dynamic(guess), s).x);
    const Rotation g = exp_so3(chart * split(u).first);
    return to_dynamic(Ad_star(g, mu));
  };
  std::string name = variant == RetractionVariant::hamiltonian ? "retraction-h" : "retraction-l";
  if (scaling == RetractionScaling::half) name += "-half";
  return make_plain_step_map(std::move(name), rigid_body_system(body), s, stepper);
}

// ---------------------------------------------------------------------------
// Collective integrator on the Hopf realization

/// The quadratic realization map T*R^2 -> so(3)*.
inline Vec3 hopf_map(const HopfLift& z) {
  const double q1 = z[0], q2 = z[1], p1 = z[2], p2 = z[3];
  return 0.25 * Vec3(2.0 * (q1 * q2 + p1 * p2),
                     2.0 * (q1 * p2 - q2 * p1),
                     q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2);
}

inline Eigen::Matrix<double, 3, 4> hopf_jacobian(const HopfLift& z) {
  const double q1 = z[0], q2 = z[1], p1 = z[2], p2 = z[3];
  Eigen::Matrix<double, 3, 4> d;
  d << q2, q1, p2, p1,
       p2, -p1, -q2, q1,
       q1, -q2, p1, -p2;
  return 0.5 * d;
}

/// Deterministic right inverse of hopf_map. In complex form a = q1 + i p1,
/// b = q2 + i p2 the fiber is a common phase; the section fixes a real and
/// nonnegative on the northern branch and b real and nonnegative on the
/// southern branch (split at mu_3 = -||mu||/2).
inline HopfLift hopf_section(const Vec3& mu) {
  const double r = mu.norm();
  if (!(r > 0.0)) {
    throw std::domain_error("hopf_section: the fiber over mu = 0 degenerates");
  }
  HopfLift z;
  if (mu[2] >= -0.5 * r) {
    const double a = std::sqrt(2.0 * (r + mu[2]));
    z << a, 2.0 * mu[0] / a, 0.0, 2.0 * mu[1] / a;
  } else {
    const double b = std::sqrt(2.0 * (r - mu[2]));
    z << 2.0 * mu[0] / b, b, -2.0 * mu[1] / b, 0.0;
  }
  return z;
}

/// Symplectic midpoint applied to the collective Hamiltonian H(hopf_map(z)).
/// The realization carries the orientation for which hopf_map is Poisson
/// onto (so(3)*, hat(mu)), so the projected map follows mu' = mu x grad H.
inline StepMap collective_step(const RigidBody& body, SolverSettings s = {}) {
  Mat4 structure = Mat4::Zero();  // ordering (q1, q2, p1, p2)
  structure(0, 2) = -1.0;
  structure(1, 3) = -1.0;
  structure(2, 0) = 1.0;
  structure(3, 1) = 1.0;

  auto collective_grad = [body](const HopfLift& z) -> HopfLift {
    return hopf_jacobian(z).transpose() * body.grad_hamiltonian(hopf_map(z));
  };

  StepMap m;
  m.name = "collective";
  m.system = rigid_body_system(body);
  m.settings = s;
  m.state_dim = 4;
  m.lift = [](const VecX& mu) -> VecX { return hopf_section(to_vec3(mu)); };
  m.read_out = [](const VecX& z) -> VecX { return to_dynamic(hopf_map(HopfLift(z))); };
  m.advance = [structure, collective_grad, s](const VecX& z, double h) -> VecX {
    const HopfLift z0(z);
    const auto g = [&](const VecX& zn) -> VecX {
      const HopfLift mid = 0.5 * (z0 + HopfLift(zn));
      return z0 + h * (structure * collective_grad(mid));
    };
    const VecX predictor = z0 + h * (structure * collective_grad(z0));
    return fixed_point(g, predictor, s).x;
  };
  return m;
}

// ---------------------------------------------------------------------------
// Hamilton-Jacobi generating-function scheme
//
// Exponential chart x centered at the identity, S_t(exp(hat(x))) = s_t(x),
//   s_t(x) = ||x||^2/2 + t H(x) + (t^2/2) [ ||grad H||^2 - c(||x||) ||x x grad H||^2 ]
// truncated at `order`. The two momenta of dS_t read
//   J_R = dexpinv_star(-x, grad s_t(x)),   J_L = dexpinv_star(x, grad s_t(x)),
// and J_L - J_R = x x grad s_t(x), so the induced map mu_k -> mu_{k+1} is a
// rotation of mu_k: exactly Poisson and orbit-preserving for any truncation.

struct GeneratingSeries {
  RigidBody body;
  int order = 2;  // 0, 1, or 2

  GeneratingSeries(const RigidBody& b, int k) : body(b), order(k) {
    if (k < 0 || k > 2) {
      throw std::domain_error("GeneratingSeries: truncation order must be 0, 1, or 2");
    }
  }

  double s0(const Vec3& x) const { return 0.5 * x.squaredNorm(); }
  double s1(const Vec3& x) const { return body.hamiltonian(x); }
  double s2(const Vec3& x) const {
    const Vec3 grad = body.grad_hamiltonian(x);
    const Vec3 w = x.cross(grad);
    return grad.squaredNorm() - detail::dexpinv_c(x.norm()) * w.squaredNorm();
  }

  double value(double t, const Vec3& x) const {
    double v = s0(x);
    if (order >= 1) v += t * s1(x);
    if (order >= 2) v += 0.5 * t * t * s2(x);
    return v;
  }

  Vec3 gradient(double t, const Vec3& x) const {
    Vec3 g = x;
    if (order >= 1) g += t * body.grad_hamiltonian(x);
    if (order >= 2) g += (0.5 * t * t) * grad_s2(x);
    return g;
  }

  Vec3 grad_s2(const Vec3& x) const {
    const double theta = x.norm();
    const Vec3 grad = body.grad_hamiltonian(x);
    const Mat3 hess = body.hessian();
    const Vec3 w = x.cross(grad);
    // d/dx [ ||w||^2 ] = 2 (Dw)^T w with Dw = -hat(grad) + hat(x) hess
    const Vec3 dw2 = 2.0 * (grad.cross(w) - hess * x.cross(w));
    return 2.0 * (hess * grad) -
           detail::dexpinv_c_prime_over_t(theta) * w.squaredNorm() * x -
           detail::dexpinv_c(theta) * dw2;
  }
};

/// Left momentum of dS_t at chart point x.
inline Vec3 hj_left_momentum(const GeneratingSeries& series, double t, const Vec3& x) {
  return dexpinv_star(x, series.gradient(t, x));
}

/// Right momentum of dS_t at chart point x.
inline Vec3 hj_right_momentum(const GeneratingSeries& series, double t, const Vec3& x) {
  return dexpinv_star(-x, series.gradient(t, x));
}

/// Non-degeneracy matrix: left-invariant derivatives of the right-invariant
/// derivatives of S_t, evaluated through the chart by finite differences.
inline Mat3 hj_nondegeneracy_matrix(const GeneratingSeries& series, double t,
                                    const Vec3& x, double fd_step = 1e-6) {
  const auto left_momentum = [&](const VecX& y) {
    return to_dynamic(hj_left_momentum(series, t, to_vec3(y)));
  };
  const Mat3 d = jacobian_fd(left_momentum, to_dynamic(x), fd_step);
  return d * dexpinv_matrix(-x);
}

inline StepMap hj_generating_step(const RigidBody& body, int order, SolverSettings s = {}) {
  // No h-proportional step guard here: the chart point solves x ~ mu, so the
  // only hard constraint is the injectivity radius on x itself.
  const GeneratingSeries series(body, order);
  auto stepper = [body, series, s](const VecX& z, double h) -> VecX {
    const Vec3 mu = to_vec3(z);
    const auto residual = [&](const VecX& xz) -> VecX {
      const Vec3 x = to_vec3(xz);
      detail::require_chart(x, "hj");
      return to_dynamic(hj_right_momentum(series, h, x) - mu);
    };
    const Vec3 x = to_vec3(newton_fd(residual, z, s).x);
    Eigen::FullPivLU<Mat3> lu(hj_nondegeneracy_matrix(series, h, x));
    if (!(lu.rcond() > 1e-12)) {
      throw SingularMatrixError("hj_generating_step: generating function degenerate "
                                "at the solution point");
    }
    return to_dynamic(hj_left_momentum(series, h, x));
  };
  return make_plain_step_map("hj" + std::to_string(order), rigid_body_system(body), s,
                             std::move(stepper));
}

// ---------------------------------------------------------------------------

/// Reconstruction of the group trajectory from an algebra path:
/// g_{k+1} = g_k exp(h xi_k). Returns g_0, ..., g_N (N = xi_path.size()).
inline std::vector<Rotation> reconstruct(const std::vector<Vec3>& xi_path,
                                         const Rotation& g0, double h) {
  std::vector<Rotation> out;
  out.reserve(xi_path.size() + 1);
  out.push_back(g0);
  for (const Vec3& xi : xi_path) {
    out.push_back(out.back() * exp_so3(h * xi));
  }
  return out;
}

}  // namespace liepoisson
