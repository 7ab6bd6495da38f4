#include "navfuse/harness.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "navfuse/errors.hpp"

namespace navfuse::harness {

namespace {

// Fixed salts keep the per-purpose random streams independent while the
// whole experiment stays a function of one seed.
constexpr std::uint64_t kImuSalt = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kDvlSalt = 0xbf58476d1ce4e5b9ull;
constexpr std::uint64_t kInitSalt = 0x94d049bb133111ebull;
constexpr std::uint64_t kMeasSalt = 0xd6e8feb86659fd93ull;

ins::NavState initial_from_truth(const sim::SensorTruth& truth) {
  ins::NavState s;
  s.time = truth.times.front();
  s.position = truth.position.front();
  s.velocity = truth.velocity.front();
  s.attitude = truth.attitude.front();
  s.accel_bias = Vec3::Zero();
  s.gyro_bias = Vec3::Zero();
  return s;
}

Vec12 step_noise(const sim::ImuCorruption& imu, std::size_t k) {
  const std::size_t n = imu.accel_white.size();
  Vec12 w;
  w.segment<3>(0) = imu.accel_white[k];
  w.segment<3>(3) = imu.gyro_white[k];
  if (k + 1 < n) {
    w.segment<3>(6) = imu.accel_bias[k + 1] - imu.accel_bias[k];
    w.segment<3>(9) = imu.gyro_bias[k + 1] - imu.gyro_bias[k];
  } else {
    w.segment<3>(6).setZero();
    w.segment<3>(9).setZero();
  }
  return w;
}

}  // namespace

ScenarioConfig default_scenario() {
  ScenarioConfig s;
  // Tight survey pattern: frequent turns keep heading error observable, and
  // the modest accelerometer noise keeps the velocity prior well below the
  // measurement variance so the cross-covariance terms carry real weight.
  s.trajectory.kind = sim::TrajectoryKind::kLawnmower;
  s.trajectory.duration_s = 400.0;
  s.trajectory.speed_mps = 2.0;
  s.trajectory.leg_length_m = 17.0;
  s.trajectory.turn_rate_radps = 0.6;
  s.trajectory.depth_m = 20.0;
  s.noise.accel_sigma = 0.01;
  s.noise.gyro_sigma = 0.018;
  s.noise.dvl_sigma = 0.045;
  s.dvl.sigma = 0.0065;
  s.initial_accel_bias = Vec3(4e-3, -3e-3, 5e-3);
  s.initial_gyro_bias = Vec3(1e-4, -8e-5, 6e-5);
  s.fuse.init_att_std = 0.005;
  s.fuse.init_gyro_bias_std = 1e-4;
  return s;
}

ScenarioConfig consistency_scenario() {
  ScenarioConfig s = default_scenario();
  s.trajectory.kind = sim::TrajectoryKind::kStraight;
  s.trajectory.speed_mps = 0.3;
  s.trajectory.duration_s = 200.0;
  s.noise.accel_sigma = 0.03;
  s.noise.gyro_sigma = 0.005;
  s.noise.dvl_sigma = 0.02;
  s.fuse.init_att_std = 0.003;
  s.fuse.init_gyro_bias_std = 5e-5;
  return s;
}

ScenarioConfig corpus_scenario(int variant) {
  ScenarioConfig s = default_scenario();
  // A miscalibrated, latent DVL plus livelier surge dynamics: the inertial
  // window carries real information about the velocity at the report time.
  s.noise.accel_sigma = 0.1;
  s.noise.gyro_sigma = 0.004;
  s.noise.accel_bias_rw = 3e-5;
  s.noise.gyro_bias_rw = 1e-5;
  s.trajectory.speed_mps = 1.2;
  s.trajectory.turn_rate_radps = 0.15;
  s.dvl.sigma = 0.0065;
  s.dvl.bias = Vec4(0.05, -0.04, 0.045, -0.055);
  s.dvl.scale = Vec4(1.05, 0.94, 1.06, 0.95);
  s.dvl.latency_s = 0.6;
  s.trajectory.speed_mod_fraction = 0.15;
  s.trajectory.speed_mod_period_s = 12.0;
  s.trajectory.depth_amplitude_m = 1.5;
  s.trajectory.depth_period_s = 25.0;
  s.initial_accel_bias = Vec3(3e-3, -2e-3, 4e-3);
  s.initial_gyro_bias = Vec3(1e-4, -8e-5, 1.2e-4);

  switch (variant % 4) {
    case 0:
      s.trajectory.kind = sim::TrajectoryKind::kLawnmower;
      s.trajectory.leg_length_m = 70.0;
      break;
    case 1:
      s.trajectory.kind = sim::TrajectoryKind::kSinusoidHeading;
      s.trajectory.heading_amplitude_rad = 0.6;
      s.trajectory.heading_period_s = 50.0;
      break;
    case 2:
      s.trajectory.kind = sim::TrajectoryKind::kRacetrack;
      s.trajectory.leg_length_m = 60.0;
      break;
    default:
      s.trajectory.kind = sim::TrajectoryKind::kLawnmower;
      s.trajectory.leg_length_m = 95.0;
      s.trajectory.initial_heading_rad = 0.7;
      s.trajectory.speed_mod_period_s = 17.0;
      break;
  }
  return s;
}

ScenarioConfig scenario_from_config(Config& cfg) {
  ScenarioConfig s = default_scenario();

  const std::string kind = cfg.get_string("trajectory", "lawnmower");
  if (kind == "straight") {
    s.trajectory.kind = sim::TrajectoryKind::kStraight;
  } else if (kind == "lawnmower") {
    s.trajectory.kind = sim::TrajectoryKind::kLawnmower;
  } else if (kind == "sinusoid") {
    s.trajectory.kind = sim::TrajectoryKind::kSinusoidHeading;
  } else if (kind == "racetrack") {
    s.trajectory.kind = sim::TrajectoryKind::kRacetrack;
  } else {
    throw ConfigError("config: unknown trajectory kind: " + kind);
  }

  s.trajectory.duration_s = cfg.get_double("duration_s", s.trajectory.duration_s);
  s.trajectory.speed_mps = cfg.get_double("speed_mps", s.trajectory.speed_mps);
  s.trajectory.initial_heading_rad =
      cfg.get_double("initial_heading_rad", s.trajectory.initial_heading_rad);
  s.trajectory.leg_length_m =
      cfg.get_double("leg_length_m", s.trajectory.leg_length_m);
  s.trajectory.turn_rate_radps =
      cfg.get_double("turn_rate_radps", s.trajectory.turn_rate_radps);
  s.trajectory.turn_ramp_s =
      cfg.get_double("turn_ramp_s", s.trajectory.turn_ramp_s);
  s.trajectory.heading_amplitude_rad = cfg.get_double(
      "heading_amplitude_rad", s.trajectory.heading_amplitude_rad);
  s.trajectory.heading_period_s =
      cfg.get_double("heading_period_s", s.trajectory.heading_period_s);
  s.trajectory.depth_m = cfg.get_double("depth_m", s.trajectory.depth_m);
  s.trajectory.depth_amplitude_m =
      cfg.get_double("depth_amplitude_m", s.trajectory.depth_amplitude_m);
  s.trajectory.depth_period_s =
      cfg.get_double("depth_period_s", s.trajectory.depth_period_s);
  s.trajectory.speed_mod_fraction =
      cfg.get_double("speed_mod_fraction", s.trajectory.speed_mod_fraction);
  s.trajectory.speed_mod_period_s =
      cfg.get_double("speed_mod_period_s", s.trajectory.speed_mod_period_s);

  s.noise.accel_sigma =
      cfg.get_double("accel_sigma_mps2", s.noise.accel_sigma);
  s.noise.gyro_sigma = cfg.get_double("gyro_sigma_radps", s.noise.gyro_sigma);
  s.noise.accel_bias_rw =
      cfg.get_double("accel_bias_rw_mps2", s.noise.accel_bias_rw);
  s.noise.gyro_bias_rw =
      cfg.get_double("gyro_bias_rw_radps", s.noise.gyro_bias_rw);
  s.noise.dvl_sigma = cfg.get_double("dvl_sigma_mps", s.noise.dvl_sigma);
  s.noise.rho = cfg.get_double("rho", s.noise.rho);

  s.dvl.sigma = cfg.get_double("beam_sigma_mps", s.dvl.sigma);
  s.dvl.latency_s = cfg.get_double("beam_latency_s", s.dvl.latency_s);
  for (int i = 0; i < 4; ++i) {
    const std::string n = std::to_string(i + 1);
    s.dvl.bias(i) = cfg.get_double("beam" + n + "_bias_mps", s.dvl.bias(i));
    s.dvl.scale(i) = cfg.get_double("beam" + n + "_scale", s.dvl.scale(i));
  }

  const double pitch_deg = cfg.get_double("beam_pitch_deg", 20.0);
  s.geometry = dvl::make_geometry(pitch_deg * std::numbers::pi / 180.0,
                                  dvl::default_geometry().yaw_rad);

  s.imu_dt_s = cfg.get_double("imu_dt_s", s.imu_dt_s);
  s.dvl_rate_hz = cfg.get_double("dvl_rate_hz", s.dvl_rate_hz);

  s.initial_accel_bias(0) = cfg.get_double("accel_bias0_x_mps2", s.initial_accel_bias(0));
  s.initial_accel_bias(1) = cfg.get_double("accel_bias0_y_mps2", s.initial_accel_bias(1));
  s.initial_accel_bias(2) = cfg.get_double("accel_bias0_z_mps2", s.initial_accel_bias(2));
  s.initial_gyro_bias(0) = cfg.get_double("gyro_bias0_x_radps", s.initial_gyro_bias(0));
  s.initial_gyro_bias(1) = cfg.get_double("gyro_bias0_y_radps", s.initial_gyro_bias(1));
  s.initial_gyro_bias(2) = cfg.get_double("gyro_bias0_z_radps", s.initial_gyro_bias(2));

  s.fuse.init_vel_std = cfg.get_double("init_vel_std_mps", s.fuse.init_vel_std);
  s.fuse.init_att_std = cfg.get_double("init_att_std_rad", s.fuse.init_att_std);
  s.fuse.init_accel_bias_std =
      cfg.get_double("init_accel_bias_std_mps2", s.fuse.init_accel_bias_std);
  s.fuse.init_gyro_bias_std =
      cfg.get_double("init_gyro_bias_std_radps", s.fuse.init_gyro_bias_std);

  const std::string rows = cfg.get_string("cross_cov_rows", "imu_white");
  if (rows == "imu_white") {
    s.fuse.rows = ekf::CrossCovRows::kImuWhiteNoise;
  } else if (rows == "full") {
    s.fuse.rows = ekf::CrossCovRows::kFullDense;
  } else {
    throw ConfigError("config: cross_cov_rows must be imu_white or full");
  }
  const std::string timescale = cfg.get_string("cross_cov_timescale", "interval");
  if (timescale == "interval") {
    s.fuse.timescale = ekf::CrossCovTimescale::kUpdateInterval;
  } else if (timescale == "imu_step") {
    s.fuse.timescale = ekf::CrossCovTimescale::kImuStep;
  } else {
    throw ConfigError("config: cross_cov_timescale must be interval or imu_step");
  }

  return s;
}

SimulatedData build_logs(const ScenarioConfig& scenario, std::uint64_t seed) {
  SimulatedData data;
  data.truth = sim::generate(scenario.trajectory, scenario.imu_dt_s,
                             scenario.fuse.gravity);
  data.imu = sim::corrupt_imu(data.truth, scenario.noise, seed ^ kImuSalt,
                              scenario.initial_accel_bias,
                              scenario.initial_gyro_bias);
  data.dvl = sim::emit_dvl(data.truth, scenario.geometry, scenario.dvl_rate_hz,
                           scenario.dvl, seed ^ kDvlSalt);
  return data;
}

std::vector<ekf::VelocityUpdate> ls_updates(
    const std::vector<dvl::DvlBeams>& beams, const dvl::BeamGeometry& geometry,
    const Mat3& r_body) {
  std::vector<ekf::VelocityUpdate> updates;
  updates.reserve(beams.size());
  for (const auto& epoch : beams) {
    ekf::VelocityUpdate u;
    u.time = epoch.time;
    u.velocity_body = dvl::ls_velocity(geometry, epoch);
    u.r_body = r_body;
    u.source = ekf::MeasurementSource::kLeastSquares;
    updates.push_back(u);
  }
  return updates;
}

NetUpdates net_updates(const net::NetworkParams& params,
                       const std::vector<ins::ImuSample>& imu_log,
                       const std::vector<dvl::DvlBeams>& beams,
                       const dvl::BeamGeometry& geometry,
                       const Mat3& fallback_r) {
  NetUpdates out;
  net::WindowBuffer buffer(params.window);
  std::size_t next_sample = 0;
  for (const auto& epoch : beams) {
    while (next_sample < imu_log.size() &&
           imu_log[next_sample].time < epoch.time - 1e-9) {
      buffer.push(imu_log[next_sample]);
      ++next_sample;
    }
    const auto meas =
        net::infer_measurement(params, buffer, epoch.along_beam, geometry);
    ekf::VelocityUpdate u;
    u.time = epoch.time;
    if (meas.has_value()) {
      u.velocity_body = meas->velocity_body;
      u.r_body = meas->r;
      u.source = ekf::MeasurementSource::kNetwork;
    } else {
      u.velocity_body = dvl::ls_velocity(geometry, epoch);
      u.r_body = fallback_r;
      u.source = ekf::MeasurementSource::kLsFallback;
      ++out.ls_fallbacks;
    }
    out.updates.push_back(u);
  }
  return out;
}

std::vector<net::TrainingSample> build_corpus(
    const std::vector<SimulatedData>& runs, const dvl::BeamGeometry& geometry,
    int window) {
  if (window < 1) throw std::invalid_argument("corpus window must be positive");
  std::vector<net::TrainingSample> samples;
  for (const auto& run : runs) {
    for (std::size_t e = 0; e < run.dvl.beams.size(); ++e) {
      const std::size_t idx = run.dvl.boundary_indices[e];
      if (idx < static_cast<std::size_t>(window)) continue;
      net::TrainingSample s;
      s.input.accel.resize(window, 3);
      s.input.gyro.resize(window, 3);
      for (int t = 0; t < window; ++t) {
        const auto& sample = run.imu.samples[idx - window + t];
        s.input.accel.row(t) = sample.specific_force;
        s.input.gyro.row(t) = sample.angular_rate;
      }
      s.input.raw_beams = run.dvl.beams[e].along_beam;
      s.input.ls_velocity = dvl::ls_velocity(geometry, run.dvl.beams[e]);
      s.target = run.dvl.velocity_body_true[e];
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

EstimatorSeries evaluate_estimators(const net::NetworkParams* params,
                                    const SimulatedData& data,
                                    const ScenarioConfig& scenario) {
  const int window = params != nullptr ? params->window : 0;
  EstimatorSeries out;
  for (std::size_t e = 0; e < data.dvl.beams.size(); ++e) {
    const std::size_t idx = data.dvl.boundary_indices[e];
    if (idx < static_cast<std::size_t>(window)) continue;
    out.times.push_back(data.dvl.beams[e].time);
    out.truth.push_back(data.dvl.velocity_body_true[e]);
    out.ls.push_back(dvl::ls_velocity(scenario.geometry, data.dvl.beams[e]));
    if (params != nullptr) {
      net::WindowedInput input;
      input.accel.resize(window, 3);
      input.gyro.resize(window, 3);
      for (int t = 0; t < window; ++t) {
        const auto& sample = data.imu.samples[idx - window + t];
        input.accel.row(t) = sample.specific_force;
        input.gyro.row(t) = sample.angular_rate;
      }
      input.raw_beams = data.dvl.beams[e].along_beam;
      input.ls_velocity = out.ls.back();
      out.net.push_back(net::forward(*params, input));
    }
  }
  return out;
}

std::vector<Vec12> window_noise_sums(const SimulatedData& data, int window) {
  if (window < 1) throw std::invalid_argument("noise window must be positive");
  std::vector<Vec12> sums;
  for (std::size_t e = 0; e < data.dvl.beams.size(); ++e) {
    const std::size_t idx = data.dvl.boundary_indices[e];
    if (idx < static_cast<std::size_t>(window)) continue;
    Vec12 w = Vec12::Zero();
    for (std::size_t k = idx - window; k < idx; ++k) {
      w.segment<3>(0) += data.imu.accel_white[k];
      w.segment<3>(3) += data.imu.gyro_white[k];
    }
    w.segment<3>(6) =
        data.imu.accel_bias[idx - 1] - data.imu.accel_bias[idx - window];
    w.segment<3>(9) =
        data.imu.gyro_bias[idx - 1] - data.imu.gyro_bias[idx - window];
    sums.push_back(w);
  }
  return sums;
}

std::vector<metrics::TruthPoint> truth_at_epochs(const SimulatedData& data) {
  const std::size_t n = data.imu.samples.size();
  std::vector<metrics::TruthPoint> out;
  out.reserve(data.dvl.beams.size());
  for (std::size_t e = 0; e < data.dvl.beams.size(); ++e) {
    const std::size_t idx = data.dvl.boundary_indices[e];
    metrics::TruthPoint p;
    p.time = data.truth.times[idx];
    p.position = data.truth.position[idx];
    p.velocity_nav = data.truth.velocity[idx];
    p.attitude = data.truth.attitude[idx];
    const std::size_t bias_idx = std::min(idx, n - 1);
    p.accel_bias = data.imu.accel_bias[bias_idx];
    p.gyro_bias = data.imu.gyro_bias[bias_idx];
    out.push_back(p);
  }
  return out;
}

PairedRuns run_paired(const ScenarioConfig& scenario, std::uint64_t seed,
                      double rho, const net::NetworkParams* params) {
  const SimulatedData data = build_logs(scenario, seed);
  const std::vector<ekf::VelocityUpdate> updates =
      params != nullptr
          ? net_updates(*params, data.imu.samples, data.dvl.beams,
                        scenario.geometry, scenario.noise.r_meas())
                .updates
          : ls_updates(data.dvl.beams, scenario.geometry,
                       scenario.noise.r_meas());
  const ins::NavState initial = initial_from_truth(data.truth);

  ekf::NoiseModel noise = scenario.noise;
  noise.rho = rho;

  PairedRuns out;
  ekf::FuseOptions aware_opts = scenario.fuse;
  aware_opts.use_cross_correlation = true;
  aware_opts.tag = "aware";
  out.aware = ekf::fuse_run(data.imu.samples, updates, initial, noise,
                            aware_opts);

  ekf::FuseOptions neglect_opts = scenario.fuse;
  neglect_opts.use_cross_correlation = false;
  neglect_opts.tag = "neglect";
  out.neglect = ekf::fuse_run(data.imu.samples, updates, initial, noise,
                              neglect_opts);

  out.truth = truth_at_epochs(data);
  return out;
}

PairedRuns run_matched_paired(const ScenarioConfig& scenario,
                              std::uint64_t seed, double rho) {
  // True initial biases and initial state errors are drawn to match the
  // filter's initial covariance, so the error budget is consistent from the
  // first epoch on.
  std::mt19937_64 init_rng(seed ^ kInitSalt);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto draw3 = [&](double sigma) {
    return Vec3(sigma * n01(init_rng), sigma * n01(init_rng),
                sigma * n01(init_rng));
  };

  ScenarioConfig varied = scenario;
  varied.initial_accel_bias = draw3(scenario.fuse.init_accel_bias_std);
  varied.initial_gyro_bias = draw3(scenario.fuse.init_gyro_bias_std);

  const SimulatedData data = build_logs(varied, seed);
  const sim::SensorTruth& truth = data.truth;
  const double dt = truth.dt;
  const std::size_t n = truth.f_body.size();

  ekf::NoiseModel noise = scenario.noise;
  noise.rho = rho;
  const Mat12 q_step = noise.q_step();
  const Mat3 r_nav = noise.r_meas();  // isotropic, so frame-independent

  // Joint sampling: the velocity-measurement noise at each epoch is the
  // modeled cross-covariance projection of the realized interval process
  // noise plus an independent remainder with the residual covariance.
  std::mt19937_64 meas_rng(seed ^ kMeasSalt);
  std::vector<ekf::VelocityUpdate> updates;
  updates.reserve(data.dvl.beams.size());

  std::size_t prev = 0;
  for (std::size_t e = 0; e < data.dvl.beams.size(); ++e) {
    const std::size_t idx = data.dvl.boundary_indices[e];
    Mat12 q_int = Mat12::Zero();
    Vec12 w_int = Vec12::Zero();
    for (std::size_t k = prev; k < idx && k < n; ++k) {
      ins::NavState ref;
      ref.attitude = truth.attitude[k];
      const ekf::ErrorDynamics dyn =
          ekf::build_error_dynamics(ref, truth.f_body[k], dt);
      q_int = symmetrized(Mat12(dyn.F * q_int * dyn.F.transpose() +
                                dyn.G * q_step * dyn.G.transpose()));
      w_int = dyn.F * w_int + dyn.G * step_noise(data.imu, k);
    }
    prev = idx;

    const Mat12x3 m =
        ekf::build_cross_cov(q_int, r_nav, rho, scenario.fuse.rows);
    const Eigen::LDLT<Mat12> q_ldlt(q_int);
    const Vec3 projected = m.transpose() * q_ldlt.solve(w_int);
    const Mat3 residual =
        symmetrized(Mat3(r_nav - m.transpose() * q_ldlt.solve(m)));

    Eigen::SelfAdjointEigenSolver<Mat3> es(residual);
    if (es.eigenvalues().minCoeff() < -1e-10 * r_nav.trace()) {
      throw NumericalError(
          "matched sampling infeasible: rho too large for the noise budget",
          {rho, es.eigenvalues().minCoeff()});
    }
    const Vec3 scale = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Vec3 z(n01(meas_rng), n01(meas_rng), n01(meas_rng));
    const Vec3 remainder = es.eigenvectors() * scale.cwiseProduct(z);

    const Vec3 noise_nav = projected + remainder;
    ekf::VelocityUpdate u;
    u.time = truth.times[idx];
    u.velocity_body = truth.attitude[idx].conjugate() *
                      (truth.velocity[idx] + noise_nav);
    u.r_body = noise.r_meas();
    u.source = ekf::MeasurementSource::kExternal;
    updates.push_back(u);
  }

  ins::NavState initial = initial_from_truth(truth);
  const Vec3 dv = draw3(scenario.fuse.init_vel_std);
  const Vec3 psi = draw3(scenario.fuse.init_att_std);
  initial.velocity -= dv;
  initial.attitude = (quat_exp(Vec3(-psi)) * initial.attitude).normalized();

  PairedRuns out;
  ekf::FuseOptions aware_opts = scenario.fuse;
  aware_opts.use_cross_correlation = true;
  aware_opts.tag = "aware";
  out.aware =
      ekf::fuse_run(data.imu.samples, updates, initial, noise, aware_opts);

  ekf::FuseOptions neglect_opts = scenario.fuse;
  neglect_opts.use_cross_correlation = false;
  neglect_opts.tag = "neglect";
  out.neglect =
      ekf::fuse_run(data.imu.samples, updates, initial, noise, neglect_opts);

  out.truth = truth_at_epochs(data);
  return out;
}

std::vector<SweepRow> rho_sweep(const ScenarioConfig& scenario,
                                std::uint64_t seed, double lo, double hi,
                                double step) {
  if (lo < 0.0 || hi > 1.0 || hi < lo || !(step > 0.0)) {
    throw std::invalid_argument("rho sweep: need 0 <= lo <= hi <= 1, step > 0");
  }
  const SimulatedData data = build_logs(scenario, seed);
  const auto updates = ls_updates(data.dvl.beams, scenario.geometry,
                                  scenario.noise.r_meas());
  const ins::NavState initial = initial_from_truth(data.truth);
  const auto truth = truth_at_epochs(data);

  ekf::FuseOptions neglect_opts = scenario.fuse;
  neglect_opts.use_cross_correlation = false;
  neglect_opts.tag = "neglect";
  const ekf::FilterRun neglect = ekf::fuse_run(
      data.imu.samples, updates, initial, scenario.noise, neglect_opts);

  std::vector<SweepRow> rows;
  for (double rho = lo; rho <= hi + 1e-12; rho += step) {
    ekf::NoiseModel noise = scenario.noise;
    noise.rho = std::min(rho, 1.0);

    ekf::FuseOptions aware_opts = scenario.fuse;
    aware_opts.use_cross_correlation = true;
    aware_opts.tag = "aware";
    const ekf::FilterRun aware =
        ekf::fuse_run(data.imu.samples, updates, initial, noise, aware_opts);

    SweepRow row;
    row.rho = noise.rho;
    double sq = 0.0;
    for (std::size_t e = 0; e < aware.epochs.size(); ++e) {
      sq += (aware.epochs[e].nav.velocity - truth[e].velocity_nav)
                .squaredNorm();
    }
    row.velocity_rmse =
        std::sqrt(sq / static_cast<double>(aware.epochs.size()));
    row.nees_mean = metrics::nees(aware, truth).mean;
    const metrics::UncertaintyReport report =
        metrics::uncertainty_summary(aware, neglect);
    row.velocity_std_improvement_pct = report.groups[0].improvement_pct;
    row.misalign_std_improvement_pct = report.groups[1].improvement_pct;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace navfuse::harness
