#include <doctest.h>

#include <random>

#include "gpsar/core/pose3.hpp"

using namespace gpsar;

TEST_CASE("so3_exp identity and quarter turn") {
  CHECK((so3_exp(Vec3::Zero()).matrix() - Mat3::Identity()).norm() ==
        doctest::Approx(0.0).epsilon(1e-15));

  // Quarter turn about z maps x to y.
  const Rot3 r = so3_exp(Vec3(0.0, 0.0, M_PI / 2.0));
  const Vec3 y = r * Vec3::UnitX();
  CHECK((y - Vec3::UnitY()).norm() < 1e-12);
}

TEST_CASE("so3 exp/log round trip") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Vec3 w(gauss(rng), gauss(rng), gauss(rng));
    w = 0.3 * w.normalized();
    const Vec3 back = so3_exp(w).log();
    CHECK((back - w).norm() < 1e-12);
  }
  // Small-angle Taylor branch.
  const Vec3 tiny(1e-10, -2e-10, 5e-11);
  CHECK((so3_exp(tiny).log() - tiny).norm() < 1e-15);
}

TEST_CASE("rotation invariants") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Rot3 r = so3_exp(Vec3(gauss(rng), gauss(rng), gauss(rng)));
    const Mat3 m = r.matrix();
    CHECK((m * m.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() <
          1e-9);
    CHECK(m.determinant() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("skew matches the cross product") {
  CHECK(skew(Vec3::Zero()).norm() == 0.0);
  CHECK(((skew(Vec3::UnitZ()) * Vec3::UnitX()) - Vec3::UnitY()).norm() <
        1e-15);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v(gauss(rng), gauss(rng), gauss(rng));
    const Vec3 w(gauss(rng), gauss(rng), gauss(rng));
    CHECK((skew(v) * w - v.cross(w)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("pose compose, inverse, associativity") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    auto rand_pose = [&]() {
      return Pose3(so3_exp(Vec3(gauss(rng), gauss(rng), gauss(rng))),
                   Vec3(gauss(rng), gauss(rng), gauss(rng)));
    };
    const Pose3 a = rand_pose(), b = rand_pose(), c = rand_pose();

    const Pose3 ident = a * a.inverse();
    CHECK(ident.translation().norm() < 1e-9);
    CHECK(ident.rotation().log().norm() < 1e-9);

    const Pose3 ab_c = (a * b) * c;
    const Pose3 a_bc = a * (b * c);
    CHECK((ab_c.translation() - a_bc.translation()).norm() < 1e-9);
    CHECK((ab_c.rotation().inverse() * a_bc.rotation()).log().norm() < 1e-9);
  }
}

TEST_CASE("right jacobian consistency with finite differences") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double h = 1e-7;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 w(gauss(rng), gauss(rng), gauss(rng));
    const Mat3 jr = so3_right_jacobian(w);
    // exp(w + h e_k) ~ exp(w) exp(Jr h e_k)
    for (int k = 0; k < 3; ++k) {
      const Vec3 dw = h * Vec3::Unit(k);
      const Vec3 lhs = (so3_exp(w).inverse() * so3_exp(w + dw)).log() / h;
      CHECK((lhs - jr.col(k)).norm() < 1e-5);
    }
    CHECK((so3_right_jacobian_inverse(w) * jr - Mat3::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}
