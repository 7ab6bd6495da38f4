#include "navfuse/ekf.hpp"

#include <cmath>
#include <stdexcept>

namespace navfuse::ekf {

Mat12 NoiseModel::q_step() const {
  validate();
  Vec12 d;
  d << Vec3::Constant(accel_sigma * accel_sigma),
      Vec3::Constant(gyro_sigma * gyro_sigma),
      Vec3::Constant(accel_bias_rw * accel_bias_rw),
      Vec3::Constant(gyro_bias_rw * gyro_bias_rw);
  return d.asDiagonal();
}

Mat3 NoiseModel::r_meas() const {
  validate();
  return Mat3::Identity() * dvl_sigma * dvl_sigma;
}

void NoiseModel::validate() const {
  if (accel_sigma < 0.0 || gyro_sigma < 0.0 || accel_bias_rw < 0.0 ||
      gyro_bias_rw < 0.0 || dvl_sigma <= 0.0) {
    throw std::invalid_argument(
        "noise model: sigmas must be nonnegative, dvl sigma positive");
  }
  if (rho < 0.0 || rho > 1.0) {
    throw std::invalid_argument("noise model: rho must lie in [0, 1]");
  }
}

ErrorDynamics build_error_dynamics(const ins::NavState& state,
                                   const Vec3& specific_force_body,
                                   double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("build_error_dynamics: dt must be positive");
  }
  const Mat3 c = state.attitude.toRotationMatrix();
  const Vec3 f_nav = c * specific_force_body;

  // Continuous-time error dynamics, correction convention:
  //   dv_dot  = -[C f]x psi - C b_a_err - C w_a
  //   psi_dot =             - C b_g_err - C w_g
  //   biases follow their random walks.
  Mat12 a = Mat12::Zero();
  a.block<3, 3>(kVelErr, kMisalign) = -skew(f_nav);
  a.block<3, 3>(kVelErr, kAccelBiasErr) = -c;
  a.block<3, 3>(kMisalign, kGyroBiasErr) = -c;

  ErrorDynamics d;
  d.F = Mat12::Identity() + a * dt;
  d.G.block<3, 3>(kVelErr, 0) = -c * dt;
  d.G.block<3, 3>(kMisalign, 3) = -c * dt;
  d.G.block<3, 3>(kAccelBiasErr, 6) = Mat3::Identity();
  d.G.block<3, 3>(kGyroBiasErr, 9) = Mat3::Identity();
  return d;
}

Mat12x3 build_cross_cov(const Mat12& q, const Mat3& r, double rho,
                        CrossCovRows rows) {
  if (rho < 0.0 || rho > 1.0) {
    throw std::invalid_argument("build_cross_cov: rho must lie in [0, 1]");
  }
  const int row_limit = rows == CrossCovRows::kImuWhiteNoise ? 6 : kStateDim;
  Mat12x3 m = Mat12x3::Zero();
  for (int i = 0; i < row_limit; ++i) {
    const double qi = std::sqrt(std::max(0.0, q(i, i)));
    for (int j = 0; j < 3; ++j) {
      m(i, j) = rho * qi * std::sqrt(std::max(0.0, r(j, j)));
    }
  }
  return m;
}

Mat12x3 gain_correlated(const Mat12& p, const Mat3x12& h, const Mat3& r,
                        const Mat12x3& m) {
  return correlated_gain_impl(p, h, r, m);
}

ErrorState predict(const ErrorState& err, const Mat12& f, const Mat12& g,
                   const Mat12& q) {
  ErrorState out;
  out.x = f * err.x;
  out.P = symmetrized(f * err.P * f.transpose() + g * q * g.transpose());
  return out;
}

ErrorState update_correlated(const ErrorState& err,
                             const ErrorStateModel& model,
                             const Vec3& innovation, int* clamped) {
  const Mat12x3 k = correlated_gain_impl(err.P, model.H, model.R, model.M);
  ErrorState out;
  out.x = err.x + k * (innovation - model.H * err.x);
  out.P = correlated_posterior_impl(err.P, model.H, model.M, k);

  for (int i = 0; i < kStateDim; ++i) {
    const double d = out.P(i, i);
    if (d < -1e-12) {
      throw NumericalError(
          "posterior covariance lost positive semidefiniteness",
          {static_cast<double>(i), d});
    }
    if (d < 0.0) {
      out.P(i, i) = 0.0;
      if (clamped != nullptr) ++(*clamped);
    }
  }
  return out;
}

std::pair<ins::NavState, ErrorState> inject_and_reset(
    const ins::NavState& state, const ErrorState& err) {
  const Vec3 psi = err.misalignment();
  if (psi.norm() >= 0.5) {
    throw NumericalError(
        "misalignment correction violates the small-angle regime",
        {psi.norm()});
  }
  ins::NavState corrected = state;
  corrected.velocity += err.delta_v();
  corrected.attitude = (quat_exp(psi) * state.attitude).normalized();
  corrected.accel_bias += err.accel_bias_err();
  corrected.gyro_bias += err.gyro_bias_err();

  ErrorState reset;
  reset.x = Vec12::Zero();
  reset.P = err.P;
  return {corrected, reset};
}

FilterRun fuse_run(const std::vector<ins::ImuSample>& imu_log,
                   const std::vector<VelocityUpdate>& updates,
                   const ins::NavState& initial, const NoiseModel& noise,
                   const FuseOptions& options) {
  noise.validate();
  if (imu_log.size() < 2) {
    throw DataError("fuse_run: need at least two IMU samples");
  }
  for (std::size_t i = 1; i < imu_log.size(); ++i) {
    if (!(imu_log[i].time > imu_log[i - 1].time)) {
      throw DataError("fuse_run: IMU timestamps must be strictly increasing");
    }
  }
  for (std::size_t i = 1; i < updates.size(); ++i) {
    if (updates[i].time < updates[i - 1].time) {
      throw DataError("fuse_run: update timestamps must be nondecreasing");
    }
  }
  if (!updates.empty() && updates.front().time <= imu_log.front().time) {
    throw DataError("fuse_run: first update precedes the IMU log");
  }

  FilterRun run;
  run.tag = options.tag;
  run.cross_correlation_aware = options.use_cross_correlation;
  run.rho = noise.rho;
  run.epochs.reserve(updates.size());

  ins::NavState nav = initial;
  ErrorState err;
  err.P.block<3, 3>(kVelErr, kVelErr) =
      Mat3::Identity() * options.init_vel_std * options.init_vel_std;
  err.P.block<3, 3>(kMisalign, kMisalign) =
      Mat3::Identity() * options.init_att_std * options.init_att_std;
  err.P.block<3, 3>(kAccelBiasErr, kAccelBiasErr) =
      Mat3::Identity() * options.init_accel_bias_std *
      options.init_accel_bias_std;
  err.P.block<3, 3>(kGyroBiasErr, kGyroBiasErr) =
      Mat3::Identity() * options.init_gyro_bias_std *
      options.init_gyro_bias_std;

  const Mat12 q_step = noise.q_step();
  Mat3x12 h = Mat3x12::Zero();
  h.block<3, 3>(0, kVelErr) = Mat3::Identity();

  // Process noise accumulated since the last update, propagated alongside P.
  // Its diagonal feeds the cross-covariance construction.
  Mat12 q_interval = Mat12::Zero();
  Mat12 q_last_step = Mat12::Zero();

  std::size_t next_update = 0;
  const double epsilon = 1e-9;

  // Each sample covers [t_k, t_k + dt); the final sample reuses the last
  // observed spacing so the log's whole span is integrated.
  for (std::size_t k = 0; k < imu_log.size(); ++k) {
    const double dt = k + 1 < imu_log.size()
                          ? imu_log[k + 1].time - imu_log[k].time
                          : imu_log[k].time - imu_log[k - 1].time;

    const Vec3 f_comp = imu_log[k].specific_force - nav.accel_bias;
    const ErrorDynamics dyn = build_error_dynamics(nav, f_comp, dt);
    nav = ins::propagate(nav, imu_log[k], dt, options.gravity);
    err = predict(err, dyn.F, dyn.G, q_step);

    q_last_step = dyn.G * q_step * dyn.G.transpose();
    q_interval =
        dyn.F * q_interval * dyn.F.transpose() + q_last_step;

    while (next_update < updates.size() &&
           updates[next_update].time <= nav.time + epsilon) {
      const VelocityUpdate& upd = updates[next_update];
      const Mat3 c = nav.attitude.toRotationMatrix();

      ErrorStateModel model;
      model.F = dyn.F;
      model.G = dyn.G;
      model.H = h;
      model.Q = q_step;
      model.R = symmetrized(c * upd.r_body * c.transpose());
      if (options.use_cross_correlation) {
        const Mat12& q_for_m =
            options.timescale == CrossCovTimescale::kUpdateInterval
                ? q_interval
                : q_last_step;
        model.M = build_cross_cov(q_for_m, model.R, noise.rho, options.rows);
      } else {
        model.M = Mat12x3::Zero();
      }

      const Vec3 v_meas_nav = c * upd.velocity_body;
      const Vec3 innovation = v_meas_nav - nav.velocity;

      err = update_correlated(err, model, innovation, &run.clamped_diagonals);

      FilterEpoch epoch;
      epoch.time = upd.time;
      epoch.dx = err.x;
      epoch.innovation = innovation;
      epoch.source = upd.source;

      auto [corrected, reset] = inject_and_reset(nav, err);
      nav = corrected;
      err = reset;

      epoch.p_diag = err.P.diagonal();
      if (options.store_full_cov) epoch.p_full = err.P;
      epoch.nav = nav;
      run.epochs.push_back(std::move(epoch));

      q_interval.setZero();
      ++next_update;
    }
  }

  if (next_update < updates.size()) {
    throw DataError("fuse_run: updates extend past the end of the IMU log");
  }
  run.final_state = nav;
  return run;
}

}  // namespace navfuse::ekf
