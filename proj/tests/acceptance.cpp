// Acceptance gate: one PASS/FAIL line per numbered criterion, with the
// measured margin and its pinned threshold. Exits with the failure count.
// argv[1] names the CLI binary, exercised by the determinism criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "helpers.hpp"
#include "navfuse/beamsnet.hpp"
#include "navfuse/dvl.hpp"
#include "navfuse/ekf.hpp"
#include "navfuse/harness.hpp"
#include "navfuse/metrics.hpp"
#include "navfuse/sim.hpp"

namespace fs = std::filesystem;
using namespace navfuse;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(const Clock::time_point& t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1. With M = 0 the correlated gain must collapse entrywise to the standard
// Kalman gain computed independently by explicit inversion.
// ---------------------------------------------------------------------------

Verdict criterion_gain_degeneracy() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  Mat3x12 h = Mat3x12::Zero();
  h.block<3, 3>(0, 0) = Mat3::Identity();
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Mat12 p = helpers::random_psd(12, rng);
    const Mat3 r = helpers::random_psd(3, rng);
    const Mat12x3 k = ekf::gain_correlated(p, h, r, Mat12x3::Zero());
    const Mat3 s = h * p * h.transpose() + r;
    const Mat12x3 k_ref = p * h.transpose() * s.inverse();
    worst = std::max(worst, (k - k_ref).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = worst < 1e-12 && secs < 5.0;
  v.detail = "max |K - K_std| " + num(worst) + " over 1000 random PSD (P, R) (tol 1e-12), " +
             num(secs, "%.2f") + " s (limit 5)";
  return v;
}

// ---------------------------------------------------------------------------
// 2. Scalar system with jointly drawn process and measurement noise: the
// cross-covariance-aware filter must not lose to the neglecting filter over
// 1e5 steps and its empirical MSE must sit on its own Riccati fixed point.
// ---------------------------------------------------------------------------

Verdict criterion_scalar_optimality() {
  using Mat1 = Eigen::Matrix<double, 1, 1>;
  const auto m1 = [](double x) {
    Mat1 m;
    m << x;
    return m;
  };
  const double f = 0.95, h = 1.0, q = 0.04, r = 0.09;
  const double m = 0.6 * std::sqrt(q * r);

  double p_fix = 1.0;
  for (int it = 0; it < 100000; ++it) {
    const double p_prior = f * f * p_fix + q;
    const double k = (p_prior * h + m) / (h * h * p_prior + 2.0 * h * m + r);
    const double p_next = p_prior - k * (h * p_prior + m);
    const bool done = std::abs(p_next - p_fix) < 1e-15;
    p_fix = p_next;
    if (done) break;
  }

  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01(0.0, 1.0);
  const int steps = 100000, burn = 200;
  double x = 0.0, x_aware = 0.0, x_neglect = 0.0;
  double p_aware = 1.0, p_neglect = 1.0;
  double se_aware = 0.0, se_neglect = 0.0;
  int counted = 0;
  for (int step = 0; step < steps; ++step) {
    const double z1 = n01(rng), z2 = n01(rng);
    const double w = std::sqrt(q) * z1;
    const double v = (m / std::sqrt(q)) * z1 + std::sqrt(r - m * m / q) * z2;
    x = f * x + w;
    const double y = h * x + v;

    x_aware = f * x_aware;
    double p_prior = f * f * p_aware + q;
    const Mat1 k_aware = ekf::correlated_gain_impl(m1(p_prior), m1(h), m1(r), m1(m));
    x_aware += k_aware(0, 0) * (y - h * x_aware);
    p_aware = ekf::correlated_posterior_impl(m1(p_prior), m1(h), m1(m), k_aware)(0, 0);

    x_neglect = f * x_neglect;
    p_prior = f * f * p_neglect + q;
    const Mat1 k_neglect =
        ekf::correlated_gain_impl(m1(p_prior), m1(h), m1(r), m1(0.0));
    x_neglect += k_neglect(0, 0) * (y - h * x_neglect);
    p_neglect =
        ekf::correlated_posterior_impl(m1(p_prior), m1(h), m1(0.0), k_neglect)(0, 0);

    if (step >= burn) {
      se_aware += (x_aware - x) * (x_aware - x);
      se_neglect += (x_neglect - x) * (x_neglect - x);
      ++counted;
    }
  }
  const double mse_aware = se_aware / counted;
  const double mse_neglect = se_neglect / counted;
  const double deviation = std::abs(mse_aware - p_fix) / p_fix;
  Verdict v;
  v.pass = mse_aware <= mse_neglect && deviation < 0.05;
  v.detail = "aware MSE " + num(mse_aware, "%.5g") + " <= neglect " +
             num(mse_neglect, "%.5g") + ", fixed point " + num(p_fix, "%.5g") +
             ", deviation " + num(100.0 * deviation, "%.2f") + "% (tol 5%)";
  return v;
}

// ---------------------------------------------------------------------------
// 3. Noiseless four-beam round trip must reproduce the body velocity.
// ---------------------------------------------------------------------------

Verdict criterion_ls_round_trip() {
  const dvl::BeamGeometry geometry = dvl::default_geometry();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 truth(u(rng), u(rng), u(rng));
    dvl::DvlBeams beams;
    beams.along_beam = dvl::beams_from_velocity(geometry, truth);
    const Vec3 back = dvl::ls_velocity(geometry, beams);
    worst = std::max(worst, (back - truth).cwiseAbs().maxCoeff());
  }
  Verdict v;
  v.pass = worst < 1e-9;
  v.detail = "max velocity error " + num(worst) + " m/s over 1000 round trips (tol 1e-9)";
  return v;
}

// ---------------------------------------------------------------------------
// 4. Reverse-mode gradients vs central finite differences, every parameter
// of a downsized network.
// ---------------------------------------------------------------------------

net::WindowedInput random_window_input(int window, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  net::WindowedInput in;
  in.accel.resize(window, 3);
  in.gyro.resize(window, 3);
  for (int t = 0; t < window; ++t) {
    for (int c = 0; c < 3; ++c) {
      in.accel(t, c) = n01(rng);
      in.gyro(t, c) = 0.1 * n01(rng);
    }
  }
  in.ls_velocity = Vec3(n01(rng), n01(rng), n01(rng));
  for (int b = 0; b < 4; ++b) in.raw_beams(b) = 0.3 * n01(rng);
  return in;
}

Verdict criterion_gradient_check() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01(0.0, 1.0);
  const int window = 12;
  std::vector<net::TrainingSample> data(16);
  for (auto& sample : data) {
    sample.input = random_window_input(window, rng);
    sample.target = 0.8 * sample.input.ls_velocity +
                    0.2 * Vec3(sample.input.accel.colwise().mean());
    sample.target += 0.01 * Vec3(n01(rng), n01(rng), n01(rng));
  }
  net::TrainConfig cfg;
  cfg.window = window;
  cfg.conv_filters = 2;
  cfg.conv_kernel = 2;
  cfg.hidden = {8, 6};
  cfg.epochs = 1;
  cfg.batch = 4;
  cfg.seed = 3;
  net::NetworkParams params = net::train(data, cfg).params;

  std::vector<const net::WindowedInput*> batch;
  std::vector<Vec3> targets;
  for (int i = 0; i < 5; ++i) {
    batch.push_back(&data[i].input);
    targets.push_back(data[i].target);
  }
  const net::Gradients grads = net::backward(params, batch, targets);
  const auto loss_at = [&]() {
    std::vector<Vec3> preds;
    preds.reserve(batch.size());
    for (const auto* in : batch) preds.push_back(net::forward(params, *in));
    return net::loss_mse(preds, targets);
  };

  const double step = 1e-6;
  double worst = 0.0;
  int checked = 0;
  const auto check_block = [&](double* values, const double* analytic, int count) {
    for (int i = 0; i < count; ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = loss_at();
      values[i] = saved - step;
      const double down = loss_at();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double denom = std::max({1e-8, std::abs(numeric), std::abs(analytic[i])});
      worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
      ++checked;
    }
  };
  check_block(params.conv_accel.w.data(), grads.conv_accel.w.data(),
              static_cast<int>(params.conv_accel.w.size()));
  check_block(params.conv_accel.b.data(), grads.conv_accel.b.data(),
              static_cast<int>(params.conv_accel.b.size()));
  check_block(params.conv_gyro.w.data(), grads.conv_gyro.w.data(),
              static_cast<int>(params.conv_gyro.w.size()));
  check_block(params.conv_gyro.b.data(), grads.conv_gyro.b.data(),
              static_cast<int>(params.conv_gyro.b.size()));
  for (std::size_t l = 0; l < params.fc.size(); ++l) {
    check_block(params.fc[l].w.data(), grads.fc[l].w.data(),
                static_cast<int>(params.fc[l].w.size()));
    check_block(params.fc[l].b.data(), grads.fc[l].b.data(),
                static_cast<int>(params.fc[l].b.size()));
  }
  check_block(params.head.w.data(), grads.head.w.data(),
              static_cast<int>(params.head.w.size()));
  check_block(params.head.b.data(), grads.head.b.data(),
              static_cast<int>(params.head.b.size()));
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = worst < 1e-4 && secs < 30.0;
  v.detail = "max relative error " + num(worst) + " over " + std::to_string(checked) +
             " parameters (tol 1e-4), " + num(secs, "%.1f") + " s (limit 30)";
  return v;
}

// ---------------------------------------------------------------------------
// 5 + 6. Train the windowed-inertial estimator on the corpus family, then on
// held-out seeds require (5) a decisive accuracy margin over per-epoch least
// squares and (6) an error/process-noise correlation signature the
// least-squares errors do not show.
// ---------------------------------------------------------------------------

struct LearnedBlock {
  Verdict accuracy;
  Verdict correlation;
};

LearnedBlock criterion_learned_estimator() {
  const auto t0 = Clock::now();
  std::vector<harness::SimulatedData> runs;
  for (int i = 0; i < 12; ++i) {
    runs.push_back(harness::build_logs(harness::corpus_scenario(i % 4),
                                       201 + static_cast<std::uint64_t>(i)));
  }
  net::TrainConfig cfg;
  cfg.hidden = {128, 32};
  cfg.dropout = 0.3;
  cfg.epochs = 120;
  cfg.patience = 15;
  cfg.seed = 42;
  const auto corpus = harness::build_corpus(
      runs, harness::corpus_scenario(0).geometry, cfg.window);
  const net::NetworkParams params = net::train(corpus, cfg).params;

  double worst_ratio = 0.0;
  int votes = 0;
  std::ostringstream per_seed;
  for (int i = 0; i < 5; ++i) {
    const harness::ScenarioConfig scenario = harness::corpus_scenario(i % 4);
    const harness::SimulatedData data =
        harness::build_logs(scenario, 301 + static_cast<std::uint64_t>(i));
    const harness::EstimatorSeries series =
        harness::evaluate_estimators(&params, data, scenario);
    double se_ls = 0.0, se_net = 0.0;
    std::vector<Vec3> err_ls, err_net;
    err_ls.reserve(series.truth.size());
    err_net.reserve(series.truth.size());
    for (std::size_t k = 0; k < series.truth.size(); ++k) {
      se_ls += (series.ls[k] - series.truth[k]).squaredNorm();
      se_net += (series.net[k] - series.truth[k]).squaredNorm();
      err_ls.push_back(series.ls[k] - series.truth[k]);
      err_net.push_back(series.net[k] - series.truth[k]);
    }
    const double ratio = std::sqrt(se_net / se_ls);
    worst_ratio = std::max(worst_ratio, ratio);

    const std::vector<Vec12> noise = harness::window_noise_sums(data, cfg.window);
    const sim::CrossCorrResult corr_net = sim::empirical_cross_corr(noise, err_net);
    const sim::CrossCorrResult corr_ls = sim::empirical_cross_corr(noise, err_ls);
    const bool vote = corr_net.any_significant() && !corr_ls.any_significant();
    votes += vote ? 1 : 0;
    per_seed << (i == 0 ? "" : " ") << num(ratio, "%.2f");
  }
  const double secs = seconds_since(t0);

  LearnedBlock block;
  block.accuracy.pass = worst_ratio <= 0.6 && secs < 900.0;
  block.accuracy.detail = "worst RMSE ratio " + num(worst_ratio, "%.3f") +
                          " (limit 0.6; per seed " + per_seed.str() + "), train+eval " +
                          num(secs, "%.0f") + " s (limit 900)";
  block.correlation.pass = votes >= 3;
  block.correlation.detail =
      std::to_string(votes) +
      "/5 seeds: learned-error correlation significant while "
      "least-squares stays inside the null band (need >= 3)";
  return block;
}

// ---------------------------------------------------------------------------
// 7. Paired aware/neglect runs at rho = 0.42: the velocity and misalignment
// uncertainty groups must each shrink by >= 5% on time average, no group may
// degrade by more than 1%, and the aware velocity-std trace must stay at or
// below the neglecting run's at every epoch after 60 s.
// ---------------------------------------------------------------------------

Verdict criterion_uncertainty_reduction() {
  double worst_velocity = 1e9, worst_misalign = 1e9, worst_group = 1e9;
  double worst_secs = 0.0;
  int trace_violations = 0;
  for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto t0 = Clock::now();
    const harness::PairedRuns pair =
        harness::run_paired(harness::default_scenario(), seed, 0.42);
    worst_secs = std::max(worst_secs, seconds_since(t0));
    const metrics::UncertaintyReport report =
        metrics::uncertainty_summary(pair.aware, pair.neglect);
    worst_velocity = std::min(worst_velocity, report.groups[0].improvement_pct);
    worst_misalign = std::min(worst_misalign, report.groups[1].improvement_pct);
    for (const auto& group : report.groups) {
      worst_group = std::min(worst_group, group.improvement_pct);
    }
    if (seed == 1) {
      for (std::size_t k = 0; k < pair.aware.epochs.size(); ++k) {
        if (pair.aware.epochs[k].time <= 60.0) continue;
        const auto std_trace = [&](const ekf::FilterEpoch& e) {
          return std::sqrt(e.p_diag(0)) + std::sqrt(e.p_diag(1)) +
                 std::sqrt(e.p_diag(2));
        };
        if (std_trace(pair.aware.epochs[k]) >
            std_trace(pair.neglect.epochs[k]) + 1e-12) {
          ++trace_violations;
        }
      }
    }
  }
  Verdict v;
  v.pass = worst_velocity >= 5.0 && worst_misalign >= 5.0 && worst_group >= -1.0 &&
           trace_violations == 0 && worst_secs < 120.0;
  v.detail = "min velocity improvement " + num(worst_velocity, "%.2f") +
             "%, misalignment " + num(worst_misalign, "%.2f") +
             "% (need >= 5), worst group " + num(worst_group, "%.2f") +
             "% (need >= -1), late-epoch trace violations " +
             std::to_string(trace_violations) + ", " + num(worst_secs, "%.1f") +
             " s/pair (limit 120), seeds 1-3";
  return v;
}

// ---------------------------------------------------------------------------
// 8. Matched-noise Monte Carlo over 50 seeds: the aware filter's grand mean
// NEES must sit in the 95% chi-square band for the state dimension, and the
// neglecting filter's per-epoch mean must occupy its band no better.
// ---------------------------------------------------------------------------

Verdict criterion_consistency() {
  const harness::ScenarioConfig scenario = harness::consistency_scenario();
  const int n_runs = 50;
  const double rho = 0.15;
  VecX sum_aware, sum_neglect;
  double grand_aware = 0.0, grand_neglect = 0.0;
  Eigen::Index epochs = 0;
  for (int run = 1; run <= n_runs; ++run) {
    const harness::PairedRuns pair = harness::run_matched_paired(
        scenario, static_cast<std::uint64_t>(run), rho);
    const metrics::NeesResult aware = metrics::nees(pair.aware, pair.truth);
    const metrics::NeesResult neglect = metrics::nees(pair.neglect, pair.truth);
    if (run == 1) {
      epochs = aware.values.size();
      sum_aware = VecX::Zero(epochs);
      sum_neglect = VecX::Zero(epochs);
    }
    sum_aware += aware.values;
    sum_neglect += neglect.values;
    grand_aware += aware.values.mean();
    grand_neglect += neglect.values.mean();
  }
  grand_aware /= n_runs;
  grand_neglect /= n_runs;

  const double band_lo = metrics::chi2_quantile(12.0, 0.025);
  const double band_hi = metrics::chi2_quantile(12.0, 0.975);
  // Band for the across-run epoch mean: 50 pooled 12-dof samples.
  const double dof = 12.0 * n_runs;
  const double mean_lo = metrics::chi2_quantile(dof, 0.025) / n_runs;
  const double mean_hi = metrics::chi2_quantile(dof, 0.975) / n_runs;
  int in_aware = 0, in_neglect = 0;
  for (Eigen::Index k = 0; k < epochs; ++k) {
    const double mean_a = sum_aware(k) / n_runs;
    const double mean_n = sum_neglect(k) / n_runs;
    in_aware += (mean_a >= mean_lo && mean_a <= mean_hi) ? 1 : 0;
    in_neglect += (mean_n >= mean_lo && mean_n <= mean_hi) ? 1 : 0;
  }
  const double occ_aware = static_cast<double>(in_aware) / epochs;
  const double occ_neglect = static_cast<double>(in_neglect) / epochs;

  Verdict v;
  v.pass = grand_aware >= band_lo && grand_aware <= band_hi &&
           occ_neglect <= occ_aware;
  v.detail = "grand aware NEES " + num(grand_aware, "%.3f") + " in [" +
             num(band_lo, "%.3f") + ", " + num(band_hi, "%.3f") +
             "], per-epoch band occupancy aware " + num(occ_aware, "%.3f") +
             " vs neglect " + num(occ_neglect, "%.3f") + " (grand neglect " +
             num(grand_neglect, "%.3f") + "), rho " + num(rho, "%.2f") +
             ", 50 seeds";
  return v;
}

// ---------------------------------------------------------------------------
// 9. Every CLI command re-run with the same seed and configuration must
// produce byte-identical outputs.
// ---------------------------------------------------------------------------

Verdict criterion_cli_determinism(const std::string& cli) {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "navfuse-acceptance-cli";
  std::error_code ec;
  fs::remove_all(root, ec);
  fs::create_directories(root);

  const auto write_cfg = [&](const std::string& name, const std::string& body) {
    std::ofstream out(root / name);
    out << body;
    return (root / name).string();
  };
  const std::string sim_cfg = write_cfg("sim.cfg", "duration_s = 60\n");
  const std::string train_cfg = write_cfg(
      "train.cfg",
      "corpus_runs = 2\ncorpus_duration_s = 80\ntrain_epochs = 2\n"
      "train_patience = 2\nwindow = 30\nconv_filters = 2\nhidden = 16\n");
  const std::string cmp_cfg = write_cfg("cmp.cfg", "duration_s = 80\nrho = 0.1\n");

  const auto out_dir = [&](const std::string& leaf) {
    return (root / leaf).string();
  };
  const auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };

  const std::string sim_out = out_dir("simulateA");
  struct Command {
    std::string name;
    std::string args;
  };
  const std::vector<Command> commands = {
      {"simulate", "simulate --config " + sim_cfg + " --seed 11"},
      {"train", "train --config " + train_cfg + " --seed 5"},
      {"fuse", "fuse --imu " + sim_out + "/imu.csv --dvl " + sim_out +
                   "/dvl.csv --truth " + sim_out + "/truth.csv --seed 3"},
      {"compare", "compare --config " + cmp_cfg + " --seed 9"},
      {"ingest", "ingest --imu " + sim_out + "/imu.csv --dvl " + sim_out +
                     "/dvl.csv --truth " + sim_out + "/truth.csv"},
  };

  const auto dir_files = [](const fs::path& dir) {
    std::vector<std::string> rel;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file()) {
        rel.push_back(fs::relative(entry.path(), dir).string());
      }
    }
    std::sort(rel.begin(), rel.end());
    return rel;
  };
  const auto read_file = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  int files_compared = 0;
  for (const auto& command : commands) {
    const fs::path dir_a = root / (command.name + "A");
    const fs::path dir_b = root / (command.name + "B");
    if (!run(command.args + " --out " + dir_a.string()) ||
        !run(command.args + " --out " + dir_b.string())) {
      v.detail = command.name + " command failed to run";
      return v;
    }
    const auto files_a = dir_files(dir_a);
    const auto files_b = dir_files(dir_b);
    if (files_a != files_b || files_a.empty()) {
      v.detail = command.name + " reruns produced different file sets";
      return v;
    }
    for (const auto& rel : files_a) {
      if (read_file(dir_a / rel) != read_file(dir_b / rel)) {
        v.detail = command.name + " rerun differs in " + rel;
        return v;
      }
      ++files_compared;
    }
  }
  v.pass = true;
  v.detail = "5 commands re-run byte-identically (" +
             std::to_string(files_compared) + " files compared)";
  return v;
}

// ---------------------------------------------------------------------------
// 10. Metric identities on random series plus exact hand-computed cases.
// ---------------------------------------------------------------------------

Verdict criterion_metric_identities() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n01(0.0, 1.0);
  bool identities = true;
  for (int trial = 0; trial < 10000 && identities; ++trial) {
    const int len = 16 + trial % 25;
    VecX ref(len), est(len);
    for (int i = 0; i < len; ++i) {
      ref(i) = n01(rng);
      est(i) = n01(rng);
    }
    identities = metrics::rmse(ref, est) + 1e-12 >= metrics::mae(ref, est) &&
                 metrics::r_squared(ref, est) <= 1.0 + 1e-12 &&
                 metrics::vaf(ref, est) <= 100.0 + 1e-9;
  }

  VecX ref(3), est(3);
  ref << 1.0, 2.0, 3.0;
  est << 1.0, 2.0, 4.0;
  const bool hand =
      std::abs(metrics::rmse(ref, est) - std::sqrt(1.0 / 3.0)) < 1e-14 &&
      std::abs(metrics::mae(ref, est) - 1.0 / 3.0) < 1e-14 &&
      std::abs(metrics::r_squared(ref, est) - 0.5) < 1e-14 &&
      std::abs(metrics::vaf(ref, est) - 100.0 * 2.0 / 3.0) < 1e-12 &&
      metrics::rmse(ref, ref) == 0.0 && metrics::mae(ref, ref) == 0.0 &&
      std::abs(metrics::r_squared(ref, ref) - 1.0) < 1e-14 &&
      std::abs(metrics::vaf(ref, ref) - 100.0) < 1e-12;

  Verdict v;
  v.pass = identities && hand;
  v.detail = std::string("RMSE >= MAE, R^2 <= 1, VAF <= 100 on 10000 series: ") +
             (identities ? "hold" : "violated") + "; hand cases " +
             (hand ? "exact" : "off");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <cli-binary>\n";
    return 2;
  }
  const std::string cli = argv[1];

  int failures = 0;
  const auto report = [&](int index, const std::string& name, const Verdict& v) {
    std::cout << "[" << std::setw(2) << index << "] " << (v.pass ? "PASS" : "FAIL")
              << "  " << name << ": " << v.detail << std::endl;
    if (!v.pass) ++failures;
  };

  report(1, "correlated gain degenerates at M = 0", criterion_gain_degeneracy());
  report(2, "scalar correlated-filter optimality", criterion_scalar_optimality());
  report(3, "noiseless least-squares round trip", criterion_ls_round_trip());
  report(4, "network gradient check", criterion_gradient_check());
  const LearnedBlock learned = criterion_learned_estimator();
  report(5, "learned estimator beats least squares", learned.accuracy);
  report(6, "noise-correlation emergence", learned.correlation);
  report(7, "paired-run uncertainty reduction", criterion_uncertainty_reduction());
  report(8, "matched-noise Monte Carlo consistency", criterion_consistency());
  report(9, "command-line determinism", criterion_cli_determinism(cli));
  report(10, "metric identities", criterion_metric_identities());

  std::cout << "acceptance: " << (10 - failures) << "/10 criteria passed"
            << std::endl;
  return failures;
}
