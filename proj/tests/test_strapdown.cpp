#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "navfuse/linalg.hpp"
#include "navfuse/strapdown.hpp"

using namespace navfuse;

TEST_CASE("quarter-turn yaw lands on the known quaternion") {
  const Quat q =
      ins::attitude_update(Quat::Identity(), Vec3(0.0, 0.0, std::numbers::pi / 2.0), 1.0);
  const double c = std::cos(std::numbers::pi / 4.0);
  CHECK(q.w() == doctest::Approx(c).epsilon(1e-12));
  CHECK(q.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q.z() == doctest::Approx(c).epsilon(1e-12));
  // Body x now points east.
  const Vec3 x_nav = q * Vec3(1.0, 0.0, 0.0);
  CHECK((x_nav - Vec3(0.0, 1.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("quat_exp and rot_log invert each other") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> angle(1e-12, std::numbers::pi - 1e-6);
  for (int trial = 0; trial < 200; ++trial) {
    Vec3 axis(n01(rng), n01(rng), n01(rng));
    axis.normalize();
    const Vec3 rotvec = angle(rng) * axis;
    const Vec3 back = rot_log(quat_exp(rotvec));
    CHECK((back - rotvec).norm() < 1e-9);
  }
  // Tiny-angle branch stays first-order exact.
  const Vec3 tiny(3e-10, -2e-10, 1e-10);
  CHECK((rot_log(quat_exp(tiny)) - tiny).norm() < 1e-18);
  CHECK(quat_exp(Vec3::Zero()).w() == doctest::Approx(1.0));
}

TEST_CASE("skew matches the cross product") {
  const Vec3 a(0.3, -1.2, 0.7);
  const Vec3 b(-0.5, 0.4, 2.0);
  CHECK((skew(a) * b - a.cross(b)).norm() < 1e-15);
  CHECK((skew(a) + skew(a).transpose()).norm() == 0.0);
}

TEST_CASE("level stationary IMU holds the state fixed") {
  ins::NavState s;
  s.velocity = Vec3(0.0, 0.0, 0.0);
  ins::ImuSample imu;
  imu.specific_force = Vec3(0.0, 0.0, -ins::kStandardGravity);
  imu.angular_rate = Vec3::Zero();
  for (int k = 0; k < 1000; ++k) {
    s = ins::propagate(s, imu, 0.01);
  }
  CHECK(s.velocity.norm() < 1e-12);
  CHECK(s.position.norm() < 1e-12);
  CHECK(s.time == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(rot_log(s.attitude).norm() < 1e-12);
}

TEST_CASE("constant acceleration integrates quadratically") {
  ins::NavState s;
  ins::ImuSample imu;
  imu.specific_force = Vec3(0.2, 0.0, -ins::kStandardGravity);
  const double dt = 0.01;
  for (int k = 0; k < 500; ++k) {
    s = ins::propagate(s, imu, dt);
  }
  // 5 s at 0.2 m/s^2: v = a t, p = a t^2 / 2.
  CHECK(s.velocity.x() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.position.x() == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(std::abs(s.velocity.z()) < 1e-12);
}

TEST_CASE("bias compensation subtracts before integrating") {
  ins::NavState s;
  s.accel_bias = Vec3(0.05, 0.0, 0.0);
  s.gyro_bias = Vec3(0.0, 0.0, 0.01);
  ins::ImuSample imu;
  imu.specific_force = Vec3(0.05, 0.0, -ins::kStandardGravity);
  imu.angular_rate = Vec3(0.0, 0.0, 0.01);
  for (int k = 0; k < 100; ++k) {
    s = ins::propagate(s, imu, 0.01);
  }
  CHECK(s.velocity.norm() < 1e-12);
  CHECK(rot_log(s.attitude).norm() < 1e-12);
}

TEST_CASE("propagation rejects bad steps") {
  ins::NavState s;
  ins::ImuSample imu;
  CHECK_THROWS_AS(ins::propagate(s, imu, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ins::propagate(s, imu, -0.01), std::invalid_argument);
  CHECK_THROWS_AS(
      ins::attitude_update(Quat::Identity(), Vec3(0.0, 0.0, 400.0), 0.01),
      std::invalid_argument);
}

TEST_CASE("velocity update adds gravity in the down axis") {
  const Vec3 v = ins::velocity_update(Vec3::Zero(), Quat::Identity(),
                                      Vec3::Zero(), 0.5, 9.80665);
  CHECK(v.x() == 0.0);
  CHECK(v.y() == 0.0);
  CHECK(v.z() == doctest::Approx(4.903325).epsilon(1e-12));
}
