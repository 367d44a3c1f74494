#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "liepoisson/lie3.hpp"
#include "oracles.hpp"

using namespace liepoisson;
using std::numbers::pi;

TEST_CASE("hat is the cross-product matrix") {
  CHECK(hat(Vec3::Zero()).isZero(0.0));

  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  CHECK((hat(Vec3(0, 0, 1)) - expected).norm() == 0.0);

  CHECK((hat(Vec3(1, 0, 0)) * Vec3(0, 1, 0) - Vec3(0, 0, 1)).norm() == 0.0);

  oracles::Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = rng.vec3(3.0), w = rng.vec3(3.0);
    CHECK((hat(v) * w - v.cross(w)).norm() == 0.0);
    CHECK((hat(v) + hat(v).transpose()).norm() == 0.0);
  }
}

TEST_CASE("vee inverts hat") {
  CHECK(vee(Mat3::Zero()) == Vec3::Zero());

  Mat3 m;
  m << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  CHECK(vee(m) == Vec3(0, 0, 1));

  oracles::Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = rng.vec3(5.0);
    CHECK(vee(hat(v)) == v);  // exact round trip
    CHECK((hat(vee(hat(v))) - hat(v)).norm() == 0.0);
  }

  Mat3 not_skew = Mat3::Identity();
  CHECK_THROWS_AS(vee(not_skew), std::domain_error);
}

TEST_CASE("exp_so3 matches the series oracle and lands in SO(3)") {
  CHECK(exp_so3(Vec3::Zero()).matrix == Mat3::Identity());

  // quarter turn about z sends e1 to e2
  const Rotation quarter = exp_so3(Vec3(0, 0, pi / 2));
  CHECK((quarter * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() < 1e-12);

  oracles::Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const Vec3 xi = rng.vec3(3.0);
    const Rotation g = exp_so3(xi);
    CHECK((g.matrix - oracles::expm_series(hat(xi))).norm() < 1e-10);
    CHECK(g.orthogonality_defect() < 1e-12);
    CHECK(std::abs(g.matrix.determinant() - 1.0) < 1e-12);
    CHECK((exp_so3(-xi).matrix - g.matrix.transpose()).norm() < 1e-13);
  }

  // tiny arguments go through the Taylor branch
  const Vec3 tiny(1e-6, -2e-6, 5e-7);
  CHECK((exp_so3(tiny).matrix - oracles::expm_series(hat(tiny))).norm() < 1e-15);
}

TEST_CASE("retraction axiom tau(xi) tau(-xi) = e") {
  oracles::Rng rng(14);
  for (int i = 0; i < 500; ++i) {
    const Vec3 xi = rng.vec3(6.0);
    const Rotation g = exp_so3(xi) * exp_so3(-xi);
    CHECK((g.matrix - Mat3::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("d/dt exp(t xi) at t=0 is hat(xi)") {
  oracles::Rng rng(15);
  for (int i = 0; i < 20; ++i) {
    const Vec3 xi = rng.vec3(2.0);
    const double eps = 1e-6;
    const Mat3 fd = (exp_so3(eps * xi).matrix - exp_so3(-eps * xi).matrix) / (2 * eps);
    CHECK((fd - hat(xi)).norm() < 1e-6);
  }
}

TEST_CASE("Rotation::from_matrix validates orthogonality") {
  CHECK_NOTHROW(Rotation::from_matrix(exp_so3(Vec3(0.3, -1.2, 0.7)).matrix));
  Mat3 skewed = Mat3::Identity();
  skewed(0, 1) = 1e-6;
  CHECK_THROWS_AS(Rotation::from_matrix(skewed), std::domain_error);
  // reflections (det = -1) are rejected
  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1.0;
  CHECK_THROWS_AS(Rotation::from_matrix(reflect), std::domain_error);
}

TEST_CASE("dexpinv against the Bernoulli-series oracle") {
  CHECK(dexpinv(Vec3::Zero(), Vec3(1, 2, 3)) == Vec3(1, 2, 3));

  oracles::Rng rng(16);
  for (int i = 0; i < 500; ++i) {
    const Vec3 xi = rng.vec3(0.5 / std::sqrt(3.0));
    const Vec3 eta = rng.vec3(2.0);
    CHECK((dexpinv(xi, eta) - oracles::dexpinv_bernoulli(xi, eta)).norm() < 1e-9);
  }

  CHECK_THROWS_AS(dexpinv(Vec3(2 * pi, 0, 0), Vec3(1, 0, 0)), std::domain_error);
}

TEST_CASE("dexpinv inverts the finite-difference dexp") {
  oracles::Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const Vec3 xi = rng.vec3(1.2);
    const Vec3 eta = rng.vec3(1.5);
    CHECK((oracles::dexp_fd(xi, dexpinv(xi, eta)) - eta).norm() < 1e-8);
  }
}

TEST_CASE("dexpinv matrix and adjoint forms agree") {
  oracles::Rng rng(18);
  for (int i = 0; i < 50; ++i) {
    const Vec3 xi = rng.vec3(2.0);
    const Vec3 v = rng.vec3(2.0);
    CHECK((dexpinv_matrix(xi) * v - dexpinv(xi, v)).norm() < 1e-15);
    CHECK((dexpinv_matrix(xi).transpose() * v - dexpinv_star(xi, v)).norm() < 1e-15);
  }
}

TEST_CASE("dexpinv coefficient derivative matches finite differences") {
  for (const double t : {0.05, 0.1, 0.2, 0.24, 0.26, 0.5, 1.0, 3.0, 5.0}) {
    const double eps = 1e-5;
    const double fd = (detail::dexpinv_c(t + eps) - detail::dexpinv_c(t - eps)) / (2 * eps);
    CHECK(std::abs(detail::dexpinv_c_prime_over_t(t) * t - fd) < 1e-9);
  }
}

TEST_CASE("Ad_star conventions") {
  const Vec3 mu(1, 0, 0);
  CHECK(Ad_star(Rotation::identity(), mu) == mu);

  // g = exp((0,0,pi/2)): Ad*_g (1,0,0) = R^T mu = (0,-1,0)
  const Rotation g = exp_so3(Vec3(0, 0, pi / 2));
  CHECK((Ad_star(g, mu) - Vec3(0, -1, 0)).norm() < 1e-15);

  oracles::Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    const Rotation r = exp_so3(rng.vec3(3.0));
    const Vec3 m = rng.vec3(2.0);
    CHECK(std::abs(Ad_star(r, m).norm() - m.norm()) < 1e-13);
    // matrix form g^T hat(mu) g
    CHECK((hat(Ad_star(r, m)) - r.matrix.transpose() * hat(m) * r.matrix).norm() < 1e-13);
  }
}

TEST_CASE("Ad_star composes as a right action") {
  oracles::Rng rng(20);
  for (int i = 0; i < 100; ++i) {
    const Rotation g1 = exp_so3(rng.vec3(3.0));
    const Rotation g2 = exp_so3(rng.vec3(3.0));
    const Vec3 mu = rng.vec3(2.0);
    CHECK((Ad_star(g2, Ad_star(g1, mu)) - Ad_star(g1 * g2, mu)).norm() < 1e-12);
  }
}

TEST_CASE("ad_star pairing identity") {
  CHECK(ad_star(Vec3(1, 2, 3), Vec3(1, 2, 3)) == Vec3::Zero());
  CHECK(ad_star(Vec3(0, 0, 1), Vec3(1, 0, 0)) == Vec3(0, -1, 0));

  oracles::Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const Vec3 xi = rng.vec3(2.0), mu = rng.vec3(2.0), eta = rng.vec3(2.0);
    CHECK(std::abs(ad_star(xi, mu).dot(eta) - mu.dot(xi.cross(eta))) < 1e-14);
  }
}
