#pragma once

#include "navfuse/linalg.hpp"

namespace navfuse::ins {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2

// One inertial sample. `time` stamps the start of the sampling interval;
// the values are treated as the interval average when integrating.
struct ImuSample {
  double time = 0.0;
  Vec3 specific_force = Vec3::Zero();  // m/s^2, body frame
  Vec3 angular_rate = Vec3::Zero();    // rad/s, body frame
};

// Strapdown navigation state. Position and velocity are north/east/down,
// the quaternion rotates body vectors into the local-level frame.
struct NavState {
  double time = 0.0;
  Vec3 position = Vec3::Zero();      // m
  Vec3 velocity = Vec3::Zero();      // m/s
  Quat attitude = Quat::Identity();  // body -> nav
  Vec3 accel_bias = Vec3::Zero();    // m/s^2
  Vec3 gyro_bias = Vec3::Zero();     // rad/s
};

// q <- q * exp(w dt), renormalized. Requires dt > 0 and |w| dt < pi.
Quat attitude_update(const Quat& attitude, const Vec3& angular_rate, double dt);

// v <- v + (C_b^n f + g_n) dt with g_n = [0, 0, +gravity].
Vec3 velocity_update(const Vec3& velocity, const Quat& attitude,
                     const Vec3& specific_force, double dt,
                     double gravity = kStandardGravity);

// Full step: bias compensation, attitude update, velocity increment with the
// mean of the old and new rotation, trapezoidal position integration.
NavState propagate(const NavState& state, const ImuSample& sample, double dt,
                   double gravity = kStandardGravity);

}  // namespace navfuse::ins
