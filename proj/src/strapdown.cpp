#include "navfuse/strapdown.hpp"

#include <numbers>
#include <stdexcept>

namespace navfuse::ins {

Quat attitude_update(const Quat& attitude, const Vec3& angular_rate,
                     double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("attitude_update: dt must be positive");
  }
  const Vec3 rotvec = angular_rate * dt;
  if (rotvec.norm() >= std::numbers::pi) {
    throw std::invalid_argument(
        "attitude_update: per-step rotation reaches pi rad; sample faster");
  }
  return (attitude * quat_exp(rotvec)).normalized();
}

Vec3 velocity_update(const Vec3& velocity, const Quat& attitude,
                     const Vec3& specific_force, double dt, double gravity) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("velocity_update: dt must be positive");
  }
  const Vec3 g_n(0.0, 0.0, gravity);
  return velocity + (attitude * specific_force + g_n) * dt;
}

NavState propagate(const NavState& state, const ImuSample& sample, double dt,
                   double gravity) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("propagate: dt must be positive");
  }
  const Vec3 f = sample.specific_force - state.accel_bias;
  const Vec3 w = sample.angular_rate - state.gyro_bias;

  NavState next = state;
  next.attitude = attitude_update(state.attitude, w, dt);

  // Rotate the specific force with the mean of the bounding attitudes so the
  // increment is second-order accurate over the step.
  const Vec3 f_nav =
      0.5 * (state.attitude.toRotationMatrix() +
             next.attitude.toRotationMatrix()) *
      f;
  const Vec3 g_n(0.0, 0.0, gravity);
  next.velocity = state.velocity + (f_nav + g_n) * dt;
  next.position = state.position + 0.5 * (state.velocity + next.velocity) * dt;
  next.time = state.time + dt;
  return next;
}

}  // namespace navfuse::ins
