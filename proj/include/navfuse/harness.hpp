#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "navfuse/beamsnet.hpp"
#include "navfuse/config.hpp"
#include "navfuse/dvl.hpp"
#include "navfuse/ekf.hpp"
#include "navfuse/metrics.hpp"
#include "navfuse/sim.hpp"

namespace navfuse::harness {

// Everything needed to realize one synthetic mission: trajectory, sensor
// error budget, rates, and the initial (true) instrument biases.
struct ScenarioConfig {
  sim::TrajectoryProfile trajectory;
  ekf::NoiseModel noise;
  sim::DvlCorruption dvl;
  dvl::BeamGeometry geometry = dvl::default_geometry();
  double imu_dt_s = 0.01;
  double dvl_rate_hz = 1.0;
  Vec3 initial_accel_bias = Vec3::Zero();
  Vec3 initial_gyro_bias = Vec3::Zero();
  ekf::FuseOptions fuse;  // filter initialization and flags
};

// Lawnmower survey with nominal instrument noise; used for the paired
// aware/neglect filter experiments.
ScenarioConfig default_scenario();

// Slow straight cruise with tight initial alignment. The velocity
// measurement model linearizes attitude error away (H ignores the
// misalignment-velocity coupling), so consistency studies need the coupling
// term |v||psi| to stay far below the measurement noise; this scenario
// guarantees that.
ScenarioConfig consistency_scenario();

// Scenario family for building the learned-estimator corpus. The beam
// sensing carries fixed miscalibration (per-beam bias and scale), report
// latency, and stronger surge modulation, so the inertial window genuinely
// informs the velocity estimate. Variants differ in trajectory shape.
ScenarioConfig corpus_scenario(int variant);

// Applies `key = value` overrides (units in key names) on top of the default
// scenario. Unknown keys are rejected by the caller via ensure_all_consumed.
ScenarioConfig scenario_from_config(Config& cfg);

struct SimulatedData {
  sim::SensorTruth truth;
  sim::ImuCorruption imu;
  sim::DvlLog dvl;
};

SimulatedData build_logs(const ScenarioConfig& scenario, std::uint64_t seed);

// Classical per-epoch least-squares beam inversion.
std::vector<ekf::VelocityUpdate> ls_updates(
    const std::vector<dvl::DvlBeams>& beams, const dvl::BeamGeometry& geometry,
    const Mat3& r_body);

// Learned per-epoch estimates; epochs arriving before the inertial window
// has filled fall back to the least-squares path.
struct NetUpdates {
  std::vector<ekf::VelocityUpdate> updates;
  int ls_fallbacks = 0;
};
NetUpdates net_updates(const net::NetworkParams& params,
                       const std::vector<ins::ImuSample>& imu_log,
                       const std::vector<dvl::DvlBeams>& beams,
                       const dvl::BeamGeometry& geometry,
                       const Mat3& fallback_r);

// One training sample per DVL epoch whose preceding inertial window is full.
std::vector<net::TrainingSample> build_corpus(
    const std::vector<SimulatedData>& runs, const dvl::BeamGeometry& geometry,
    int window);

// Per-epoch estimator comparison on one run (truth is the body velocity at
// the epoch instant). `params` may be null to skip the learned column.
struct EstimatorSeries {
  std::vector<double> times;
  std::vector<Vec3> truth;
  std::vector<Vec3> ls;
  std::vector<Vec3> net;
};
EstimatorSeries evaluate_estimators(const net::NetworkParams* params,
                                    const SimulatedData& data,
                                    const ScenarioConfig& scenario);

// Realized process noise aggregated over the inertial window preceding each
// epoch: [sum accel white; sum gyro white; accel bias drift; gyro bias
// drift]. Aligned with evaluate_estimators epochs.
std::vector<Vec12> window_noise_sums(const SimulatedData& data, int window);

// Truth states aligned with the DVL epoch schedule (biases are the values in
// effect on the final sample before each epoch).
std::vector<metrics::TruthPoint> truth_at_epochs(const SimulatedData& data);

// Runs the cross-correlation-aware and the neglecting filter on identical
// logs and updates. With `params` null the updates come from least squares.
struct PairedRuns {
  ekf::FilterRun aware;
  ekf::FilterRun neglect;
  std::vector<metrics::TruthPoint> truth;
};
PairedRuns run_paired(const ScenarioConfig& scenario, std::uint64_t seed,
                      double rho, const net::NetworkParams* params = nullptr);

// Like run_paired, but the velocity-measurement noise is drawn jointly with
// the realized inertial noise so the modeled cross-covariance holds exactly
// in the data. Used for Monte Carlo consistency studies.
PairedRuns run_matched_paired(const ScenarioConfig& scenario,
                              std::uint64_t seed, double rho);

struct SweepRow {
  double rho = 0.0;
  double velocity_rmse = 0.0;  // per-epoch speed error of the aware filter
  double nees_mean = 0.0;
  double velocity_std_improvement_pct = 0.0;  // vs the neglecting baseline
  double misalign_std_improvement_pct = 0.0;
};
std::vector<SweepRow> rho_sweep(const ScenarioConfig& scenario,
                                std::uint64_t seed, double lo, double hi,
                                double step);

}  // namespace navfuse::harness
