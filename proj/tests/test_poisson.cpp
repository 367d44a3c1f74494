#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "liepoisson/harness.hpp"
#include "liepoisson/integrators.hpp"
#include "liepoisson/models.hpp"
#include "liepoisson/poisson.hpp"
#include "oracles.hpp"

using namespace liepoisson;

TEST_CASE("hamiltonian_vf on the rigid body") {
  const auto sys = rigid_body_system(Vec3(1, 2, 3));

  // principal-axis equilibrium
  CHECK(hamiltonian_vf(sys, to_dynamic(Vec3(1, 0, 0))).norm() == 0.0);

  // mu = (1,1,1): mu x grad H = (-1/6, 2/3, -1/2)
  const VecX vf = hamiltonian_vf(sys, to_dynamic(Vec3(1, 1, 1)));
  CHECK(std::abs(vf[0] - (-1.0 / 6.0)) < 1e-15);
  CHECK(std::abs(vf[1] - (2.0 / 3.0)) < 1e-15);
  CHECK(std::abs(vf[2] - (-1.0 / 2.0)) < 1e-15);

  // grad H = 0 at the origin
  CHECK(hamiltonian_vf(sys, to_dynamic(Vec3::Zero())).norm() == 0.0);

  VecX bad(3);
  bad << 1.0, std::nan(""), 0.0;
  CHECK_THROWS_AS(hamiltonian_vf(sys, bad), std::domain_error);

  oracles::Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const VecX z = rng.vecx(3, 2.0);
    CHECK(std::abs(sys.grad_hamiltonian(z).dot(hamiltonian_vf(sys, z))) < 1e-12);
  }
}

TEST_CASE("jacobian_fd on identity and linear maps") {
  const auto id = [](const VecX& z) { return z; };
  const VecX z0 = to_dynamic(Vec3(0.3, -0.7, 1.1));
  CHECK((jacobian_fd(id, z0) - MatX::Identity(3, 3)).norm() < 1e-10);

  MatX a(3, 3);
  a << 1, 2, -1, 0, 3, 4, -2, 1, 0.5;
  const auto lin = [a](const VecX& z) -> VecX { return a * z; };
  CHECK((jacobian_fd(lin, z0) - a).norm() < 1e-9);

  CHECK_THROWS_AS(jacobian_fd(id, z0, 0.0), std::domain_error);
}

TEST_CASE("jacobian_fd of the reference flow matches the symmetric-top closed form") {
  // Symmetric body I = (1,1,2): mu3 is constant and (mu1,mu2) precesses at
  // rate w(mu3) = mu3 (1 - 1/I3); the flow map and its Jacobian are closed-form.
  const double i3 = 2.0;
  const auto sys = rigid_body_system(Vec3(1, 1, i3));
  const double t = 0.7;
  const auto flow = [&](const VecX& mu) { return reference_flow(sys, mu, t, 1e-13); };

  const Vec3 mu0(0.8, -0.4, 1.1);
  const double dw = 1.0 - 1.0 / i3;
  const double angle = mu0[2] * dw * t;
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 expected;
  expected << c, -s, t * dw * (-s * mu0[0] - c * mu0[1]),
              s,  c, t * dw * ( c * mu0[0] - s * mu0[1]),
              0,  0, 1;
  const MatX numeric = jacobian_fd(flow, to_dynamic(mu0), 1e-4);
  CHECK((numeric - expected).norm() < 1e-6);
}

TEST_CASE("poisson_defect baselines") {
  const auto sys = rigid_body_system(Vec3(1, 2, 3));
  const VecX mu0 = to_dynamic(Vec3(1, 0.5, -0.3));

  StepMap identity_map = make_plain_step_map(
      "identity", sys, {}, [](const VecX& z, double) { return z; });
  CHECK(poisson_defect(identity_map, mu0, 0.1) <= 1e-9);

  // mid-point rule on a constant structure is a Poisson automorphism
  const auto osc = oracles::harmonic_oscillator();
  const auto mp_osc = midpoint_step(osc);
  VecX z0(2);
  z0 << 1.0, 0.0;
  CHECK(poisson_defect(mp_osc, z0, 0.1) <= 1e-8);
}

TEST_CASE("mid-point defect on the rigid body decays at third order") {
  const auto sys = rigid_body_system(Vec3(1, 2, 3));
  const auto mp = midpoint_step(sys);
  const VecX mu0 = to_dynamic(Vec3(1, 0.5, -0.3));
  const auto points = defect_points(mp, mu0, {0.2, 0.1, 0.05});
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double ratio = points[i - 1].second / points[i].second;
    CHECK(ratio > 6.0);
    CHECK(ratio < 10.0);
  }
  const auto fit = fit_loglog(points, kDefectFloor);
  CHECK(std::abs(fit.slope - 3.0) < 0.3);
}

TEST_CASE("first_integral_drift") {
  const auto sys = rigid_body_system(Vec3(1, 2, 3));
  const auto dlp = lie_euler_lp_step(RigidBody(Vec3(1, 2, 3)));
  const Trajectory traj = integrate(dlp, to_dynamic(Vec3(1, 0.5, -0.3)), 0.05, 500);

  const FirstIntegral constant{"one", [](const VecX&) { return 42.0; },
                               [](const VecX& z) { return VecX(VecX::Zero(z.size())); }};
  CHECK(first_integral_drift(traj, constant) == 0.0);

  // the Casimir along an Ad*-type trajectory is preserved to roundoff
  CHECK(first_integral_drift(traj, sys.casimirs[0]) <= 1e-12);

  // the Hamiltonian along a discrete-gradient trajectory
  const auto dg = discrete_gradient_step(sys, DiscreteGradientKind::mean_value);
  const Trajectory tg = integrate(dg, to_dynamic(Vec3(1, 0.5, -0.3)), 0.1, 100);
  const FirstIntegral energy{"H", sys.hamiltonian, sys.grad_hamiltonian};
  CHECK(first_integral_drift(tg, energy) <= 1e-10);

  CHECK_THROWS_AS(first_integral_drift(std::vector<VecX>{}, constant), std::domain_error);
}

TEST_CASE("structure invariants hold at sampled points") {
  const auto sys = rigid_body_system(Vec3(1, 2, 3));
  const FirstIntegral energy{"H", sys.hamiltonian, sys.grad_hamiltonian};
  oracles::Rng rng(32);
  for (int i = 0; i < 100; ++i) {
    const VecX z = rng.vecx(3, 2.0);
    const MatX pi = sys.bivector(z);
    CHECK((pi + pi.transpose()).norm() <= 1e-12);
    CHECK(jacobi_residual_fd(sys, z) <= 1e-8);
    // Casimir gradient is annihilated along the dynamics
    CHECK((pi * sys.casimirs[0].gradient(z)).norm() <= 1e-10);
    CHECK(std::abs(sys.casimirs[0].gradient(z).dot(hamiltonian_vf(sys, z))) <= 1e-10);
    // {H, C} vanishes under Pi-contraction
    CHECK(std::abs(poisson_bracket(sys, energy, sys.casimirs[0], z)) <= 1e-12);
  }
}
