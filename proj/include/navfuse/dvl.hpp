#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "navfuse/linalg.hpp"

namespace navfuse::dvl {

// Four-beam Janus-cross geometry. Beam i points along
//   [cos(yaw_i) sin(pitch), sin(yaw_i) sin(pitch), cos(pitch)]
// in the body frame, so a beam's along-axis velocity is direction . v_body.
struct BeamGeometry {
  double pitch_rad = 0.0;            // tilt from the body z axis, (0, pi/2)
  std::array<double, 4> yaw_rad{};   // azimuth of each beam
  Mat4x3 directions = Mat4x3::Zero();
};

struct DvlBeams {
  double time = 0.0;
  Vec4 along_beam = Vec4::Zero();        // m/s
  std::array<bool, 4> valid{true, true, true, true};
};

// Default transducer layout: 20 deg pitch, yaws 45/135/225/315 deg.
BeamGeometry make_geometry(double pitch_rad,
                           const std::array<double, 4>& yaw_rad);
BeamGeometry default_geometry();

// Noiseless along-beam velocities for a body-frame velocity.
Vec4 beams_from_velocity(const BeamGeometry& geometry, const Vec3& v_body);

// Least-squares body velocity from the valid beams (needs at least 3).
// Solved by orthogonal decomposition; a singular-value ratio above 1e8
// is rejected as degenerate geometry.
Vec3 ls_velocity(const BeamGeometry& geometry, const DvlBeams& beams);

// scale .* beams + bias + N(0, sigma^2), elementwise, using the supplied
// engine. The seeded overload is a convenience for one-shot use.
Vec4 corrupt_beams(const Vec4& true_beams, const Vec4& bias, const Vec4& scale,
                   double sigma, std::mt19937_64& rng);
Vec4 corrupt_beams(const Vec4& true_beams, const Vec4& bias, const Vec4& scale,
                   double sigma, std::uint64_t seed);

}  // namespace navfuse::dvl
