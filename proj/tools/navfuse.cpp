// Command-line harness: dataset simulation and ingestion, estimator
// training, filter execution, and aware-vs-neglect comparison.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "navfuse/beamsnet.hpp"
#include "navfuse/config.hpp"
#include "navfuse/csvio.hpp"
#include "navfuse/errors.hpp"
#include "navfuse/harness.hpp"
#include "navfuse/metrics.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace navfuse;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "key = value experiment configuration");
  cmd->add_option("--out", args.out_dir,
                  "output directory (default $NAVFUSE_OUT_ROOT/<command>)");
  cmd->add_option("--seed", args.seed, "root random seed")
      ->capture_default_str();
}

fs::path resolve_out(const CommonArgs& args, const std::string& command) {
  if (!args.out_dir.empty()) return fs::path(args.out_dir);
  const char* root = std::getenv("NAVFUSE_OUT_ROOT");
  if (root == nullptr || *root == '\0') {
    throw ConfigError("no --out given and NAVFUSE_OUT_ROOT is unset");
  }
  return fs::path(root) / command;
}

Config load_config(const CommonArgs& args) {
  if (args.config_path.empty()) return Config{};
  return Config::from_file(args.config_path);
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const CommonArgs& args, const json& extra) {
  json m;
  m["format"] = "navfuse-manifest-v1";
  m["command"] = command;
  m["seed"] = args.seed;
  m["config_file"] = args.config_path;
  json cfg = json::object();
  if (!args.config_path.empty()) {
    const Config parsed = Config::from_file(args.config_path);
    for (const auto& [key, value] : parsed.entries()) {
      cfg[key] = value;
    }
  }
  m["config"] = cfg;
  m["options"] = extra;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw DataError("cannot write manifest in " + dir.string());
  out << m.dump(1) << "\n";
}

std::vector<metrics::TruthPoint> truth_points_all(
    const harness::SimulatedData& data) {
  std::vector<metrics::TruthPoint> points;
  points.reserve(data.truth.times.size());
  for (std::size_t k = 0; k < data.truth.times.size(); ++k) {
    metrics::TruthPoint p;
    p.time = data.truth.times[k];
    p.position = data.truth.position[k];
    p.velocity_nav = data.truth.velocity[k];
    p.attitude = data.truth.attitude[k];
    points.push_back(p);
  }
  return points;
}

json vec3_json(const Vec3& v) { return json{v(0), v(1), v(2)}; }

json run_summary_json(const ekf::FilterRun& run) {
  json j;
  j["tag"] = run.tag;
  j["cross_correlation_aware"] = run.cross_correlation_aware;
  j["rho"] = run.rho;
  j["epochs"] = run.epochs.size();
  j["clamped_diagonals"] = run.clamped_diagonals;
  j["final_velocity_mps"] = vec3_json(run.final_state.velocity);
  j["final_position_m"] = vec3_json(run.final_state.position);
  j["final_accel_bias_mps2"] = vec3_json(run.final_state.accel_bias);
  j["final_gyro_bias_radps"] = vec3_json(run.final_state.gyro_bias);
  return j;
}

json uncertainty_json(const metrics::UncertaintyReport& report) {
  json groups = json::object();
  const auto& names = metrics::UncertaintyReport::group_names();
  for (std::size_t g = 0; g < report.groups.size(); ++g) {
    const auto& s = report.groups[g];
    groups[names[g]] = {{"avg_std_aware", s.avg_std_aware},
                        {"avg_std_neglect", s.avg_std_neglect},
                        {"improvement_pct", s.improvement_pct},
                        {"final_std_aware", s.final_std_aware},
                        {"final_std_neglect", s.final_std_neglect},
                        {"final_improvement_pct", s.final_improvement_pct}};
  }
  return groups;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CommonArgs& args) {
  Config cfg = load_config(args);
  const harness::ScenarioConfig scenario = harness::scenario_from_config(cfg);
  cfg.ensure_all_consumed();

  const fs::path out = resolve_out(args, "simulate");
  fs::create_directories(out);

  const harness::SimulatedData data = harness::build_logs(scenario, args.seed);
  io::write_imu_csv((out / "imu.csv").string(), data.imu.samples);
  io::write_dvl_csv((out / "dvl.csv").string(), data.dvl.beams);
  io::write_truth_csv((out / "truth.csv").string(), truth_points_all(data));

  write_manifest(out, "simulate", args,
                 json{{"imu_rows", data.imu.samples.size()},
                      {"dvl_rows", data.dvl.beams.size()}});
  std::cout << "wrote " << data.imu.samples.size() << " imu rows, "
            << data.dvl.beams.size() << " dvl epochs to " << out.string()
            << "\n";
  return 0;
}

// ------------------------------------------------------------------- train

net::TrainConfig train_config_from(Config& cfg, std::uint64_t seed) {
  net::TrainConfig tc;
  tc.epochs = cfg.get_int("train_epochs", tc.epochs);
  tc.batch = cfg.get_int("train_batch", tc.batch);
  tc.learning_rate = cfg.get_double("train_lr", tc.learning_rate);
  tc.patience = cfg.get_int("train_patience", tc.patience);
  tc.val_fraction = cfg.get_double("train_val_fraction", tc.val_fraction);
  tc.dropout = cfg.get_double("train_dropout", tc.dropout);
  tc.window = cfg.get_int("window", tc.window);
  tc.conv_filters = cfg.get_int("conv_filters", tc.conv_filters);
  tc.conv_kernel = cfg.get_int("conv_kernel", tc.conv_kernel);
  tc.raw_beams_head = cfg.get_bool("raw_beams_head", tc.raw_beams_head);
  const std::string hidden = cfg.get_string("hidden", "");
  if (!hidden.empty()) {
    tc.hidden.clear();
    std::istringstream in(hidden);
    std::string tok;
    while (std::getline(in, tok, ',')) tc.hidden.push_back(std::stoi(tok));
  }
  tc.seed = seed;
  return tc;
}

int cmd_train(const CommonArgs& args, const std::string& resume_path) {
  Config cfg = load_config(args);
  const int corpus_runs = cfg.get_int("corpus_runs", 4);
  const double corpus_duration =
      cfg.get_double("corpus_duration_s", 0.0);  // 0: per-variant default
  net::TrainConfig tc = train_config_from(cfg, args.seed);
  cfg.ensure_all_consumed();
  if (corpus_runs < 1) throw ConfigError("config: corpus_runs must be >= 1");

  const fs::path out = resolve_out(args, "train");
  fs::create_directories(out);

  std::vector<harness::SimulatedData> runs;
  dvl::BeamGeometry geometry;
  for (int i = 0; i < corpus_runs; ++i) {
    harness::ScenarioConfig scenario = harness::corpus_scenario(i);
    if (corpus_duration > 0.0) scenario.trajectory.duration_s = corpus_duration;
    geometry = scenario.geometry;
    runs.push_back(
        harness::build_logs(scenario, args.seed + static_cast<std::uint64_t>(i)));
  }
  const auto corpus = harness::build_corpus(runs, geometry, tc.window);

  std::optional<net::NetworkParams> resume;
  if (!resume_path.empty()) resume = net::load_params(resume_path);

  const net::TrainResult result =
      net::train(corpus, tc, resume ? &*resume : nullptr);
  net::save_params((out / "params.json").string(), result.params);

  std::vector<std::vector<double>> history;
  for (std::size_t e = 0; e < result.history.train_loss.size(); ++e) {
    history.push_back({static_cast<double>(e), result.history.train_loss[e],
                       result.history.val_loss[e]});
  }
  io::write_table_csv((out / "history.csv").string(),
                      {"epoch", "train_loss", "val_loss"}, history);

  write_manifest(out, "train", args,
                 json{{"corpus_samples", corpus.size()},
                      {"best_epoch", result.history.best_epoch},
                      {"resume", resume_path}});
  std::cout << "trained on " << corpus.size() << " samples, best epoch "
            << result.history.best_epoch << ", residual sigma "
            << io::format_double(result.params.residual_sigma.mean()) << "\n";
  return 0;
}

// -------------------------------------------------------------------- fuse

int cmd_fuse(const CommonArgs& args, const std::string& imu_path,
             const std::string& dvl_path, const std::string& truth_path,
             const std::string& params_path, bool neglect) {
  Config cfg = load_config(args);
  const harness::ScenarioConfig scenario = harness::scenario_from_config(cfg);
  cfg.ensure_all_consumed();

  const fs::path out = resolve_out(args, "fuse");
  fs::create_directories(out);

  const auto imu_log = io::read_imu_csv(imu_path);
  const auto beams = io::read_dvl_csv(dvl_path);

  std::vector<ekf::VelocityUpdate> updates;
  int fallbacks = 0;
  if (!params_path.empty()) {
    const net::NetworkParams params = net::load_params(params_path);
    auto built = harness::net_updates(params, imu_log, beams,
                                      scenario.geometry,
                                      scenario.noise.r_meas());
    updates = std::move(built.updates);
    fallbacks = built.ls_fallbacks;
  } else {
    updates = harness::ls_updates(beams, scenario.geometry,
                                  scenario.noise.r_meas());
  }

  std::vector<metrics::TruthPoint> truth;
  ins::NavState initial;
  if (!truth_path.empty()) {
    truth = io::read_truth_csv(truth_path);
    if (truth.empty()) throw DataError("truth file has no rows");
    initial.time = truth.front().time;
    initial.position = truth.front().position;
    initial.velocity = truth.front().velocity_nav;
    initial.attitude = truth.front().attitude;
  } else if (!imu_log.empty()) {
    initial.time = imu_log.front().time;
  }

  ekf::FuseOptions opts = scenario.fuse;
  opts.use_cross_correlation = !neglect;
  opts.tag = neglect ? "neglect" : "aware";
  const ekf::FilterRun run =
      ekf::fuse_run(imu_log, updates, initial, scenario.noise, opts);

  io::write_run_csv((out / "run.csv").string(), run);

  json summary = run_summary_json(run);
  summary["ls_fallbacks"] = fallbacks;
  if (!truth.empty()) {
    // Interpolation-free alignment: score only epochs that sit on truth rows.
    std::vector<double> est_speed, truth_speed;
    std::size_t cursor = 0;
    for (const auto& epoch : run.epochs) {
      while (cursor < truth.size() && truth[cursor].time < epoch.time - 1e-6) {
        ++cursor;
      }
      if (cursor >= truth.size()) break;
      if (std::abs(truth[cursor].time - epoch.time) > 1e-6) continue;
      est_speed.push_back(epoch.nav.velocity.norm());
      truth_speed.push_back(truth[cursor].velocity_nav.norm());
    }
    if (est_speed.size() >= 2) {
      const Eigen::Map<const VecX> est(est_speed.data(),
                                       static_cast<Eigen::Index>(est_speed.size()));
      const Eigen::Map<const VecX> ref(truth_speed.data(),
                                       static_cast<Eigen::Index>(truth_speed.size()));
      summary["speed_rmse_mps"] = metrics::rmse(ref, est);
      summary["speed_mae_mps"] = metrics::mae(ref, est);
      summary["speed_r2"] = metrics::r_squared(ref, est);
      summary["speed_vaf_pct"] = metrics::vaf(ref, est);
      summary["scored_epochs"] = est_speed.size();
    }
  }
  std::ofstream sum(out / "summary.json");
  sum << summary.dump(1) << "\n";

  write_manifest(out, "fuse", args,
                 json{{"imu", imu_path},
                      {"dvl", dvl_path},
                      {"truth", truth_path},
                      {"params", params_path},
                      {"neglect", neglect}});
  std::cout << run.tag << " run: " << run.epochs.size() << " epochs"
            << (truth.empty() ? ""
                              : ", speed rmse " +
                                    io::format_double(summary.value(
                                        "speed_rmse_mps", 0.0)))
            << "\n";
  return 0;
}

// ----------------------------------------------------------------- compare

int cmd_compare(const CommonArgs& args, double rho_flag,
                const std::string& params_path, bool matched,
                const std::string& sweep_spec) {
  Config cfg = load_config(args);
  const harness::ScenarioConfig scenario = harness::scenario_from_config(cfg);
  cfg.ensure_all_consumed();
  const double rho = rho_flag >= 0.0 ? rho_flag : scenario.noise.rho;

  const fs::path out = resolve_out(args, "compare");
  fs::create_directories(out);

  if (!sweep_spec.empty()) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(sweep_spec);
    in >> lo >> c1 >> hi >> c2 >> step;
    if (in.fail() || c1 != ':' || c2 != ':') {
      throw ConfigError("--rho-sweep expects lo:hi:step");
    }
    const auto rows = harness::rho_sweep(scenario, args.seed, lo, hi, step);
    std::vector<std::vector<double>> table;
    for (const auto& r : rows) {
      table.push_back({r.rho, r.velocity_rmse, r.nees_mean,
                       r.velocity_std_improvement_pct,
                       r.misalign_std_improvement_pct});
    }
    io::write_table_csv((out / "sweep.csv").string(),
                        {"rho", "velocity_rmse_mps", "nees_mean",
                         "velocity_std_improvement_pct",
                         "misalign_std_improvement_pct"},
                        table);
    write_manifest(out, "compare", args,
                   json{{"sweep", sweep_spec}, {"params", params_path}});
    std::cout << "swept " << rows.size() << " rho values\n";
    return 0;
  }

  harness::PairedRuns pair;
  if (matched) {
    pair = harness::run_matched_paired(scenario, args.seed, rho);
  } else if (!params_path.empty()) {
    const net::NetworkParams params = net::load_params(params_path);
    pair = harness::run_paired(scenario, args.seed, rho, &params);
  } else {
    pair = harness::run_paired(scenario, args.seed, rho);
  }

  io::write_run_csv((out / "aware.csv").string(), pair.aware);
  io::write_run_csv((out / "neglect.csv").string(), pair.neglect);

  const metrics::UncertaintyReport report =
      metrics::uncertainty_summary(pair.aware, pair.neglect);
  const metrics::NeesResult nees_aware = metrics::nees(pair.aware, pair.truth);
  const metrics::NeesResult nees_neglect =
      metrics::nees(pair.neglect, pair.truth);

  json summary;
  summary["rho"] = rho;
  summary["matched_noise"] = matched;
  summary["uncertainty"] = uncertainty_json(report);
  summary["nees"] = {{"aware_mean", nees_aware.mean},
                     {"neglect_mean", nees_neglect.mean},
                     {"band_lo", nees_aware.band_lo},
                     {"band_hi", nees_aware.band_hi},
                     {"aware_frac_in_band", nees_aware.frac_in_band},
                     {"neglect_frac_in_band", nees_neglect.frac_in_band}};
  summary["aware"] = run_summary_json(pair.aware);
  summary["neglect"] = run_summary_json(pair.neglect);
  std::ofstream sum(out / "summary.json");
  sum << summary.dump(1) << "\n";

  write_manifest(out, "compare", args,
                 json{{"rho", rho},
                      {"matched", matched},
                      {"params", params_path}});
  std::cout << "velocity std improvement "
            << io::format_double(report.groups[0].improvement_pct)
            << "%, misalignment "
            << io::format_double(report.groups[1].improvement_pct) << "%\n";
  return 0;
}

// ------------------------------------------------------------------ ingest

int cmd_ingest(const CommonArgs& args, const std::string& imu_path,
               const std::string& dvl_path, const std::string& truth_path) {
  const fs::path out = resolve_out(args, "ingest");
  fs::create_directories(out);

  const auto imu_log = io::read_imu_csv(imu_path);
  for (std::size_t k = 1; k < imu_log.size(); ++k) {
    if (!(imu_log[k].time > imu_log[k - 1].time)) {
      throw DataError("imu timestamps must be strictly increasing (row " +
                      std::to_string(k + 1) + ")");
    }
  }
  if (imu_log.size() >= 3) {
    const double nominal = imu_log[1].time - imu_log[0].time;
    for (std::size_t k = 1; k < imu_log.size(); ++k) {
      const double gap = imu_log[k].time - imu_log[k - 1].time;
      if (gap > 2.0 * nominal) {
        std::cerr << "warning: imu gap of " << io::format_double(gap)
                  << " s before t=" << io::format_double(imu_log[k].time)
                  << "\n";
      }
    }
  }

  const auto beams = io::read_dvl_csv(dvl_path);
  for (std::size_t k = 1; k < beams.size(); ++k) {
    if (beams[k].time < beams[k - 1].time) {
      throw DataError("dvl timestamps must be nondecreasing (row " +
                      std::to_string(k + 1) + ")");
    }
  }

  io::write_imu_csv((out / "imu.csv").string(), imu_log);
  io::write_dvl_csv((out / "dvl.csv").string(), beams);
  if (!truth_path.empty()) {
    io::write_truth_csv((out / "truth.csv").string(),
                        io::read_truth_csv(truth_path));
  }
  write_manifest(out, "ingest", args,
                 json{{"imu", imu_path},
                      {"dvl", dvl_path},
                      {"truth", truth_path}});
  std::cout << "ingested " << imu_log.size() << " imu rows, " << beams.size()
            << " dvl epochs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inertial/Doppler sensor-fusion experiment harness"};
  app.require_subcommand(1);

  CommonArgs sim_args, train_args, fuse_args, cmp_args, ing_args;
  std::string resume_path;
  std::string fuse_imu, fuse_dvl, fuse_truth, fuse_params;
  bool fuse_neglect = false;
  double cmp_rho = -1.0;
  std::string cmp_params, cmp_sweep;
  bool cmp_matched = false;
  std::string ing_imu, ing_dvl, ing_truth;

  CLI::App* c_sim = app.add_subcommand("simulate", "generate a dataset");
  add_common(c_sim, sim_args);

  CLI::App* c_train =
      app.add_subcommand("train", "train the velocity estimator");
  add_common(c_train, train_args);
  c_train->add_option("--resume", resume_path,
                      "continue from a parameter archive");

  CLI::App* c_fuse = app.add_subcommand("fuse", "run the error-state filter");
  add_common(c_fuse, fuse_args);
  c_fuse->add_option("--imu", fuse_imu, "imu csv")->required();
  c_fuse->add_option("--dvl", fuse_dvl, "dvl csv")->required();
  c_fuse->add_option("--truth", fuse_truth, "truth csv (enables metrics)");
  c_fuse->add_option("--params", fuse_params,
                     "network parameter archive (default: least squares)");
  c_fuse->add_flag("--neglect", fuse_neglect,
                   "ignore the process/measurement cross-covariance");

  CLI::App* c_cmp =
      app.add_subcommand("compare", "paired aware/neglect filter runs");
  add_common(c_cmp, cmp_args);
  c_cmp->add_option("--rho", cmp_rho, "cross-correlation coefficient");
  c_cmp->add_option("--params", cmp_params, "network parameter archive");
  c_cmp->add_flag("--matched", cmp_matched,
                  "draw measurement noise jointly with the process noise");
  c_cmp->add_option("--rho-sweep", cmp_sweep, "lo:hi:step grid over rho");

  CLI::App* c_ing =
      app.add_subcommand("ingest", "validate and normalize external logs");
  add_common(c_ing, ing_args);
  c_ing->add_option("--imu", ing_imu, "imu csv")->required();
  c_ing->add_option("--dvl", ing_dvl, "dvl csv")->required();
  c_ing->add_option("--truth", ing_truth, "truth csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim_args);
    if (c_train->parsed()) return cmd_train(train_args, resume_path);
    if (c_fuse->parsed()) {
      return cmd_fuse(fuse_args, fuse_imu, fuse_dvl, fuse_truth, fuse_params,
                      fuse_neglect);
    }
    if (c_cmp->parsed()) {
      return cmd_compare(cmp_args, cmp_rho, cmp_params, cmp_matched, cmp_sweep);
    }
    if (c_ing->parsed()) return cmd_ingest(ing_args, ing_imu, ing_dvl, ing_truth);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
