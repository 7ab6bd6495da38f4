#pragma once

#include <cstdint>
#include <vector>

#include "navfuse/dvl.hpp"
#include "navfuse/ekf.hpp"
#include "navfuse/linalg.hpp"
#include "navfuse/strapdown.hpp"

namespace navfuse::sim {

enum class TrajectoryKind { kStraight, kLawnmower, kSinusoidHeading, kRacetrack };

// Piecewise-analytic mission profile. Headings follow straight legs joined by
// constant-rate turns with raised-cosine ramps (lawnmower alternates turn
// direction, racetrack keeps it), or a sinusoidal heading sweep. Optional
// surge and depth modulation keep the dynamics from being trivially constant.
struct TrajectoryProfile {
  TrajectoryKind kind = TrajectoryKind::kLawnmower;
  double duration_s = 400.0;
  double speed_mps = 1.2;
  double initial_heading_rad = 0.0;
  double leg_length_m = 80.0;
  double turn_rate_radps = 0.15;
  double turn_ramp_s = 2.0;
  double heading_amplitude_rad = 0.5;  // sinusoid-heading only
  double heading_period_s = 60.0;
  double depth_m = 20.0;
  double depth_amplitude_m = 0.0;
  double depth_period_s = 40.0;
  double speed_mod_fraction = 0.0;
  double speed_mod_period_s = 45.0;
};

// Noise-free kinematic truth sampled on the IMU grid. States live on the
// step boundaries (times[k] = k dt, k = 0..N); the inertial samples are the
// interval midpoints, which is what an averaging sensor would report.
struct SensorTruth {
  double dt = 0.01;
  double gravity = ins::kStandardGravity;
  std::vector<double> times;      // N+1 boundaries
  std::vector<Vec3> position;     // NED, m
  std::vector<Vec3> velocity;     // NED, m/s
  std::vector<Quat> attitude;     // body -> nav
  std::vector<Vec3> f_body;       // N samples, m/s^2
  std::vector<Vec3> w_body;       // N samples, rad/s

  Vec3 velocity_body(std::size_t boundary_index) const;
  std::size_t boundary_index(double time) const;
};

SensorTruth generate(const TrajectoryProfile& profile, double dt = 0.01,
                     double gravity = ins::kStandardGravity);

// Corrupted IMU log plus the exact noise realizations that produced it, so
// downstream diagnostics can correlate against the true process noise.
struct ImuCorruption {
  std::vector<ins::ImuSample> samples;
  std::vector<Vec3> accel_white;  // per sample
  std::vector<Vec3> gyro_white;
  std::vector<Vec3> accel_bias;   // bias value applied to sample k
  std::vector<Vec3> gyro_bias;
};

ImuCorruption corrupt_imu(const SensorTruth& truth,
                          const ekf::NoiseModel& noise, std::uint64_t seed,
                          const Vec3& initial_accel_bias = Vec3::Zero(),
                          const Vec3& initial_gyro_bias = Vec3::Zero());

struct DvlCorruption {
  double sigma = 0.0065;          // m/s along-beam white noise
  Vec4 bias = Vec4::Zero();       // m/s additive per beam
  Vec4 scale = Vec4::Ones();      // multiplicative per beam
  double latency_s = 0.0;         // beams reflect velocity this long ago
};

struct DvlLog {
  std::vector<dvl::DvlBeams> beams;     // epochs 1/rate, 2/rate, ...
  std::vector<Vec4> white_noise;        // recorded beam noise
  std::vector<Vec3> velocity_body_true; // truth at each epoch
  std::vector<std::size_t> boundary_indices;
};

DvlLog emit_dvl(const SensorTruth& truth, const dvl::BeamGeometry& geometry,
                double rate_hz, const DvlCorruption& corruption,
                std::uint64_t seed);

// Sample cross-covariance and correlation between an aligned process-noise
// sequence and a measurement-error sequence. Pairs w[k - lag] with v[k].
// An entry is flagged significant when |corr| exceeds 3/sqrt(n_pairs).
struct CrossCorrResult {
  Mat12x3 cov = Mat12x3::Zero();
  Mat12x3 corr = Mat12x3::Zero();
  Eigen::Matrix<bool, 12, 3> significant;
  double threshold = 0.0;
  int n_pairs = 0;

  bool any_significant() const;
};

CrossCorrResult empirical_cross_corr(const std::vector<Vec12>& process_noise,
                                     const std::vector<Vec3>& meas_error,
                                     int lag = 0);

}  // namespace navfuse::sim
