#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "navfuse/errors.hpp"
#include "navfuse/linalg.hpp"
#include "navfuse/strapdown.hpp"

namespace navfuse::ekf {

// Error-state layout: velocity error, misalignment, accelerometer bias error,
// gyroscope bias error, all 3-vectors. The error is the correction that maps
// the navigation estimate onto truth, so injection adds it.
inline constexpr int kStateDim = 12;
inline constexpr int kVelErr = 0;
inline constexpr int kMisalign = 3;
inline constexpr int kAccelBiasErr = 6;
inline constexpr int kGyroBiasErr = 9;

struct ErrorState {
  Vec12 x = Vec12::Zero();
  Mat12 P = Mat12::Zero();

  Vec3 delta_v() const { return x.segment<3>(kVelErr); }
  Vec3 misalignment() const { return x.segment<3>(kMisalign); }
  Vec3 accel_bias_err() const { return x.segment<3>(kAccelBiasErr); }
  Vec3 gyro_bias_err() const { return x.segment<3>(kGyroBiasErr); }
};

// White-noise and random-walk strengths. The IMU sigmas are per-sample
// standard deviations; the bias terms are random-walk steps per sample.
// dvl_sigma is the per-axis sigma of the resolved velocity measurement.
struct NoiseModel {
  double accel_sigma = 0.03;     // m/s^2
  double gyro_sigma = 0.005;     // rad/s
  double accel_bias_rw = 5e-6;   // m/s^2 per step
  double gyro_bias_rw = 3e-7;    // rad/s per step
  double dvl_sigma = 0.02;       // m/s per axis
  double rho = 0.42;             // process/measurement correlation level

  Mat12 q_step() const;
  Mat3 r_meas() const;
  void validate() const;
};

// Which rows of the process/measurement cross-covariance are populated.
// kImuWhiteNoise keeps the accelerometer and gyroscope white-noise channels
// (the ones a window-based velocity estimator actually consumes) and zeroes
// the bias random-walk rows; kFullDense fills all twelve for ablations.
enum class CrossCovRows { kImuWhiteNoise, kFullDense };

struct ErrorDynamics {
  Mat12 F = Mat12::Identity();
  Mat12 G = Mat12::Zero();
};

// First-order discrete error dynamics at the current state. The specific
// force must already be bias-compensated and expressed in the body frame.
ErrorDynamics build_error_dynamics(const ins::NavState& state,
                                   const Vec3& specific_force_body, double dt);

// M_ij = rho sqrt(Q_ii) sqrt(R_jj) on the selected rows, zero elsewhere.
Mat12x3 build_cross_cov(const Mat12& q, const Mat3& r, double rho,
                        CrossCovRows rows = CrossCovRows::kImuWhiteNoise);

// ---------------------------------------------------------------------------
// Dimension-generic update algebra. The 12-state filter and the scalar
// reference cases share these templates, so there is a single implementation
// of the correlated-noise gain and posterior.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void check_innovation_cov(const T& s) {
  const MatX dense{s};
  Eigen::SelfAdjointEigenSolver<MatX> eig{dense};
  const double floor = 1e-12 * std::max(1.0, s.trace() / s.rows());
  if (eig.eigenvalues()(0) <= floor) {
    std::vector<double> diag(eig.eigenvalues().data(),
                             eig.eigenvalues().data() + s.rows());
    throw NumericalError(
        "innovation covariance is not positive definite", diag);
  }
}

}  // namespace detail

// K = (P H' + M) (H P H' + H M + M' H' + R)^-1, solved rather than inverted.
template <typename PT, typename HT, typename RT, typename MT>
auto correlated_gain_impl(const PT& p, const HT& h, const RT& r, const MT& m) {
  const auto pht = (p * h.transpose()).eval();
  const auto s =
      (h * pht + h * m + m.transpose() * h.transpose() + r).eval();
  detail::check_innovation_cov(s);
  // K S = P H' + M  =>  K' = S^-1 (P H' + M)'
  return s.ldlt().solve((pht + m).transpose()).transpose().eval();
}

// P+ = P- - K (H P- + M'), symmetrized.
template <typename PT, typename HT, typename MT, typename KT>
auto correlated_posterior_impl(const PT& p, const HT& h, const MT& m,
                               const KT& k) {
  return symmetrized(p - k * (h * p + m.transpose()));
}

Mat12x3 gain_correlated(const Mat12& p, const Mat3x12& h, const Mat3& r,
                        const Mat12x3& m);

// Model matrices for one measurement epoch.
struct ErrorStateModel {
  Mat12 F = Mat12::Identity();
  Mat12 G = Mat12::Zero();
  Mat3x12 H = Mat3x12::Zero();
  Mat12 Q = Mat12::Zero();
  Mat3 R = Mat3::Zero();
  Mat12x3 M = Mat12x3::Zero();
};

// Covariance propagation: P <- F P F' + G Q G'. The error mean stays zero
// under closed-loop correction, so only P moves.
ErrorState predict(const ErrorState& err, const Mat12& f, const Mat12& g,
                   const Mat12& q);

// Correlated-noise measurement update. Diagonal entries in [-1e-12, 0) are
// clamped to zero and counted through `clamped`; a diagonal below -1e-12
// throws. The updated mean is K * innovation on a zero prior.
ErrorState update_correlated(const ErrorState& err, const ErrorStateModel& model,
                             const Vec3& innovation, int* clamped = nullptr);

// Applies the estimated corrections to the navigation state and zeroes the
// error mean. Requires |misalignment| < 0.5 rad.
std::pair<ins::NavState, ErrorState> inject_and_reset(
    const ins::NavState& state, const ErrorState& err);

// ---------------------------------------------------------------------------
// Whole-mission fusion driver.
// ---------------------------------------------------------------------------

enum class MeasurementSource { kLeastSquares, kNetwork, kLsFallback, kExternal };

// One resolved velocity measurement in the body frame with its covariance.
struct VelocityUpdate {
  double time = 0.0;
  Vec3 velocity_body = Vec3::Zero();
  Mat3 r_body = Mat3::Zero();
  MeasurementSource source = MeasurementSource::kLeastSquares;
};

// Cross-covariance timescale: kUpdateInterval builds M from the process noise
// accumulated since the previous measurement (the window the measurement is
// produced from); kImuStep uses only the final propagation step.
enum class CrossCovTimescale { kUpdateInterval, kImuStep };

struct FuseOptions {
  bool use_cross_correlation = true;
  CrossCovRows rows = CrossCovRows::kImuWhiteNoise;
  CrossCovTimescale timescale = CrossCovTimescale::kUpdateInterval;
  double init_vel_std = 0.05;         // m/s
  double init_att_std = 0.01;         // rad
  double init_accel_bias_std = 0.01;  // m/s^2
  double init_gyro_bias_std = 0.001;  // rad/s
  double gravity = ins::kStandardGravity;
  bool store_full_cov = true;
  std::string tag;
};

struct FilterEpoch {
  double time = 0.0;
  Vec12 dx = Vec12::Zero();     // injected correction
  Vec12 p_diag = Vec12::Zero(); // posterior covariance diagonal
  Vec3 innovation = Vec3::Zero();
  Mat12 p_full = Mat12::Zero(); // retained when store_full_cov is set
  ins::NavState nav;            // corrected navigation state
  MeasurementSource source = MeasurementSource::kLeastSquares;
};

struct FilterRun {
  std::string tag;
  bool cross_correlation_aware = true;
  double rho = 0.0;
  std::vector<FilterEpoch> epochs;
  ins::NavState final_state;
  int clamped_diagonals = 0;  // posterior diagonals clamped from [-1e-12, 0)
};

// Runs the full predict/update cycle over an IMU log with sparse velocity
// updates. Update timestamps must be nondecreasing, lie on IMU step
// boundaries, and arrive no faster than the IMU.
FilterRun fuse_run(const std::vector<ins::ImuSample>& imu_log,
                   const std::vector<VelocityUpdate>& updates,
                   const ins::NavState& initial, const NoiseModel& noise,
                   const FuseOptions& options);

}  // namespace navfuse::ekf
