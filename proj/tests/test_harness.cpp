#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "navfuse/config.hpp"
#include "navfuse/errors.hpp"
#include "navfuse/harness.hpp"
#include "navfuse/metrics.hpp"

using namespace navfuse;

namespace {

harness::ScenarioConfig short_scenario() {
  harness::ScenarioConfig s = harness::default_scenario();
  s.trajectory.duration_s = 60.0;
  return s;
}

}  // namespace

TEST_CASE("simulated logs are deterministic in the seed") {
  const harness::ScenarioConfig s = short_scenario();
  const harness::SimulatedData a = harness::build_logs(s, 4);
  const harness::SimulatedData b = harness::build_logs(s, 4);
  const harness::SimulatedData c = harness::build_logs(s, 5);

  REQUIRE(a.imu.samples.size() == b.imu.samples.size());
  CHECK((a.imu.samples[123].specific_force -
         b.imu.samples[123].specific_force)
            .norm() == 0.0);
  CHECK((a.dvl.beams[7].along_beam - b.dvl.beams[7].along_beam).norm() == 0.0);
  CHECK((a.imu.samples[123].specific_force -
         c.imu.samples[123].specific_force)
            .norm() > 0.0);
  CHECK((a.dvl.beams[7].along_beam - c.dvl.beams[7].along_beam).norm() > 0.0);

  // Epoch schedule: one per second, starting at 1 s.
  CHECK(a.dvl.beams.size() == 60);
  CHECK(a.dvl.beams.front().time == doctest::Approx(1.0));
  // True initial biases are planted.
  CHECK((a.imu.accel_bias.front() - s.initial_accel_bias).norm() == 0.0);
}

TEST_CASE("beam inversion updates carry the configured covariance") {
  const harness::ScenarioConfig s = short_scenario();
  const harness::SimulatedData data = harness::build_logs(s, 9);
  const Mat3 r = Mat3::Identity() * 1e-4;
  const auto updates = harness::ls_updates(data.dvl.beams, s.geometry, r);
  REQUIRE(updates.size() == data.dvl.beams.size());
  for (std::size_t i = 0; i < updates.size(); i += 13) {
    CHECK(updates[i].time == doctest::Approx(data.dvl.beams[i].time));
    CHECK((updates[i].r_body - r).norm() == 0.0);
    CHECK(updates[i].source == ekf::MeasurementSource::kLeastSquares);
    const Vec3 direct =
        dvl::ls_velocity(s.geometry, data.dvl.beams[i]);
    CHECK((updates[i].velocity_body - direct).norm() == 0.0);
  }
}

TEST_CASE("epoch-aligned truth matches the simulated records") {
  const harness::ScenarioConfig s = short_scenario();
  const harness::SimulatedData data = harness::build_logs(s, 2);
  const auto truth = harness::truth_at_epochs(data);
  REQUIRE(truth.size() == data.dvl.beams.size());
  for (std::size_t i = 0; i < truth.size(); i += 11) {
    const std::size_t idx = data.dvl.boundary_indices[i];
    CHECK(truth[i].time == doctest::Approx(data.truth.times[idx]));
    CHECK((truth[i].velocity_nav - data.truth.velocity[idx]).norm() == 0.0);
    // Bias bookkeeping: value in effect on the final sample of the window.
    const std::size_t bias_idx = std::min(idx, data.imu.accel_bias.size() - 1);
    CHECK((truth[i].accel_bias - data.imu.accel_bias[bias_idx]).norm() == 0.0);
  }
}

TEST_CASE("paired filters share data and differ only in awareness") {
  const harness::ScenarioConfig s = short_scenario();
  const harness::PairedRuns runs = harness::run_paired(s, 3, 0.42);

  REQUIRE(runs.aware.epochs.size() == runs.neglect.epochs.size());
  CHECK(runs.aware.cross_correlation_aware);
  CHECK_FALSE(runs.neglect.cross_correlation_aware);
  CHECK(runs.aware.rho == doctest::Approx(0.42));
  // Identical innovation at the first epoch: same prior, same measurement.
  CHECK((runs.aware.epochs.front().innovation -
         runs.neglect.epochs.front().innovation)
            .norm() == 0.0);
  // Covariances diverge once the gain differs.
  CHECK((runs.aware.epochs.back().p_diag - runs.neglect.epochs.back().p_diag)
            .norm() > 0.0);

  // rho = 0 collapses the pair to identical trajectories.
  const harness::PairedRuns zero = harness::run_paired(s, 3, 0.0);
  CHECK((zero.aware.epochs.back().p_full - zero.neglect.epochs.back().p_full)
            .norm() == 0.0);
  CHECK((zero.aware.final_state.velocity - zero.neglect.final_state.velocity)
            .norm() == 0.0);

  CHECK(runs.truth.size() == runs.aware.epochs.size());
}

TEST_CASE("matched-noise runs keep the aware filter consistent") {
  harness::ScenarioConfig s = harness::consistency_scenario();
  s.trajectory.duration_s = 120.0;
  const harness::PairedRuns runs = harness::run_matched_paired(s, 11, 0.15);

  const metrics::NeesResult aware = metrics::nees(runs.aware, runs.truth);
  CHECK(aware.values.minCoeff() > 0.0);
  // A single 120-epoch run scatters around the 12-dof mean.
  CHECK(aware.mean > 4.0);
  CHECK(aware.mean < 24.0);
  CHECK(aware.frac_in_band > 0.7);
  CHECK(runs.aware.rho == doctest::Approx(0.15));

  // Same measurement sequence goes into both filters.
  CHECK((runs.aware.epochs.front().innovation -
         runs.neglect.epochs.front().innovation)
            .norm() == 0.0);

  // Infeasible correlation demands more than the measurement variance holds.
  CHECK_THROWS_AS(harness::run_matched_paired(s, 11, 0.9), NumericalError);
}

TEST_CASE("scenario overrides map config keys onto the simulation") {
  Config cfg = Config::from_string(
      "trajectory = sinusoid\n"
      "duration_s = 45\n"
      "speed_mps = 0.9\n"
      "heading_amplitude_rad = 0.4\n"
      "heading_period_s = 15\n"
      "accel_sigma_mps2 = 0.05\n"
      "rho = 0.3\n"
      "beam_sigma_mps = 0.004\n"
      "beam_latency_s = 0.2\n"
      "beam2_bias_mps = 0.015\n"
      "beam2_scale = 0.97\n"
      "dvl_rate_hz = 2\n"
      "accel_bias0_x_mps2 = 0.006\n"
      "init_vel_std_mps = 0.08\n"
      "cross_cov_timescale = imu_step\n"
      "cross_cov_rows = full\n");
  const harness::ScenarioConfig s = harness::scenario_from_config(cfg);
  CHECK_NOTHROW(cfg.ensure_all_consumed());

  CHECK(s.trajectory.kind == sim::TrajectoryKind::kSinusoidHeading);
  CHECK(s.trajectory.duration_s == doctest::Approx(45.0));
  CHECK(s.trajectory.speed_mps == doctest::Approx(0.9));
  CHECK(s.trajectory.heading_amplitude_rad == doctest::Approx(0.4));
  CHECK(s.noise.accel_sigma == doctest::Approx(0.05));
  CHECK(s.noise.rho == doctest::Approx(0.3));
  CHECK(s.dvl.sigma == doctest::Approx(0.004));
  CHECK(s.dvl.latency_s == doctest::Approx(0.2));
  CHECK(s.dvl.bias(1) == doctest::Approx(0.015));
  CHECK(s.dvl.scale(1) == doctest::Approx(0.97));
  CHECK(s.dvl_rate_hz == doctest::Approx(2.0));
  CHECK(s.initial_accel_bias.x() == doctest::Approx(0.006));
  CHECK(s.fuse.init_vel_std == doctest::Approx(0.08));
  CHECK(s.fuse.timescale == ekf::CrossCovTimescale::kImuStep);
  CHECK(s.fuse.rows == ekf::CrossCovRows::kFullDense);

  Config bad = Config::from_string("trajectory = spiral\n");
  CHECK_THROWS_AS(harness::scenario_from_config(bad), ConfigError);
  Config bad_ts = Config::from_string("cross_cov_timescale = daily\n");
  CHECK_THROWS_AS(harness::scenario_from_config(bad_ts), ConfigError);
}

TEST_CASE("corpus samples pair full inertial windows with epoch truth") {
  harness::ScenarioConfig s = harness::corpus_scenario(0);
  s.trajectory.duration_s = 40.0;
  const harness::SimulatedData data = harness::build_logs(s, 6);
  const auto corpus = harness::build_corpus({data}, s.geometry, 100);

  REQUIRE(!corpus.empty());
  CHECK(corpus.size() == data.dvl.beams.size());
  const auto& sample = corpus[4];
  CHECK(sample.input.accel.rows() == 100);
  CHECK(sample.input.gyro.rows() == 100);
  // Window ends on the sample just before the epoch boundary.
  const std::size_t idx = data.dvl.boundary_indices[4];
  CHECK(sample.input.accel.row(99) ==
        data.imu.samples[idx - 1].specific_force.transpose());
  CHECK(sample.input.accel.row(0) ==
        data.imu.samples[idx - 100].specific_force.transpose());
  CHECK((sample.target - data.dvl.velocity_body_true[4]).norm() == 0.0);
  CHECK((sample.input.raw_beams - data.dvl.beams[4].along_beam).norm() == 0.0);
  CHECK((sample.input.ls_velocity -
         dvl::ls_velocity(s.geometry, data.dvl.beams[4]))
            .norm() == 0.0);

  // A window longer than the first epoch interval drops that epoch.
  const auto trimmed = harness::build_corpus({data}, s.geometry, 150);
  CHECK(trimmed.size() == corpus.size() - 1);
}

TEST_CASE("window noise aggregation aligns with the epoch schedule") {
  harness::ScenarioConfig s = short_scenario();
  const harness::SimulatedData data = harness::build_logs(s, 8);
  const auto sums = harness::window_noise_sums(data, 100);
  REQUIRE(sums.size() == data.dvl.beams.size());

  // Hand-accumulate the first epoch's window.
  const std::size_t idx = data.dvl.boundary_indices[0];
  Vec3 accel_sum = Vec3::Zero();
  for (std::size_t k = idx - 100; k < idx; ++k) {
    accel_sum += data.imu.accel_white[k];
  }
  CHECK((sums[0].head<3>() - accel_sum).norm() < 1e-15);
  const Vec3 drift =
      data.imu.accel_bias[idx - 1] - data.imu.accel_bias[idx - 100];
  CHECK((sums[0].segment<3>(6) - drift).norm() < 1e-15);
}

TEST_CASE("estimator comparison reports the classical column") {
  const harness::ScenarioConfig s = short_scenario();
  const harness::SimulatedData data = harness::build_logs(s, 12);
  const harness::EstimatorSeries series =
      harness::evaluate_estimators(nullptr, data, s);
  REQUIRE(series.times.size() == data.dvl.beams.size());
  CHECK(series.net.empty());
  CHECK(series.ls.size() == series.truth.size());

  // Classical error is small but nonzero under beam noise.
  double err = 0.0;
  for (std::size_t i = 0; i < series.ls.size(); ++i) {
    err += (series.ls[i] - series.truth[i]).norm();
  }
  err /= static_cast<double>(series.ls.size());
  CHECK(err > 0.0);
  CHECK(err < 0.1);
}

TEST_CASE("correlation sweep spans the requested grid") {
  harness::ScenarioConfig s = short_scenario();
  const auto rows = harness::rho_sweep(s, 5, 0.0, 0.6, 0.3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rho == doctest::Approx(0.0));
  CHECK(rows[1].rho == doctest::Approx(0.3));
  CHECK(rows[2].rho == doctest::Approx(0.6));
  // rho = 0 is the baseline itself: zero improvement by construction.
  CHECK(rows[0].velocity_std_improvement_pct == doctest::Approx(0.0));
  for (const auto& row : rows) {
    CHECK(row.velocity_rmse > 0.0);
    CHECK(std::isfinite(row.nees_mean));
    CHECK(std::isfinite(row.misalign_std_improvement_pct));
  }
  // Only the uncorrelated row is guaranteed a proper covariance: beyond the
  // joint-realizability bound the claimed cross term exceeds what the interval
  // process noise can supply and the posterior may lose definiteness, so NEES
  // is only meaningful on the rho = 0 row.
  CHECK(rows[0].nees_mean > 0.0);
  CHECK_THROWS_AS(harness::rho_sweep(s, 5, 0.5, 0.1, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(harness::rho_sweep(s, 5, 0.0, 0.5, 0.0),
                  std::invalid_argument);
}
