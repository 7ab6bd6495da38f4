#pragma once

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace navfuse {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat12x3 = Eigen::Matrix<double, 12, 3>;
using Mat3x12 = Eigen::Matrix<double, 3, 12>;
using Mat4x3 = Eigen::Matrix<double, 4, 3>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Quat = Eigen::Quaterniond;

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

// Unit quaternion for a rotation of |v| radians about v/|v|.
// Series expansion of sin(a/2)/a below 1e-8 rad keeps the limit exact.
inline Quat quat_exp(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  double half_sinc;
  if (angle < 1e-8) {
    half_sinc = 0.5 - angle * angle / 48.0;
  } else {
    half_sinc = std::sin(0.5 * angle) / angle;
  }
  return Quat(std::cos(0.5 * angle), half_sinc * rotvec.x(),
              half_sinc * rotvec.y(), half_sinc * rotvec.z());
}

// Rotation vector of q, angle in [0, pi]. Inverse of quat_exp.
inline Vec3 rot_log(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  const Eigen::AngleAxisd aa(q);
  return aa.angle() * aa.axis();
}

template <typename Derived>
auto symmetrized(const Eigen::MatrixBase<Derived>& m) {
  return (0.5 * (m + m.transpose())).eval();
}

}  // namespace navfuse
