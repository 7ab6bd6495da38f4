#pragma once

#include <array>
#include <vector>

#include "navfuse/ekf.hpp"
#include "navfuse/linalg.hpp"

namespace navfuse::metrics {

// Scalar-series metrics. Inputs must be equally sized and nonempty;
// r_squared and vaf additionally need nonzero variance in the reference.
double rmse(const VecX& reference, const VecX& estimate);
double mae(const VecX& reference, const VecX& estimate);
double r_squared(const VecX& reference, const VecX& estimate);
double vaf(const VecX& reference, const VecX& estimate);  // percent

VecX norm_series(const std::vector<Vec3>& v);
VecX axis_series(const std::vector<Vec3>& v, int axis);

double chi2_quantile(double dof, double p);

// Truth needed to score a filter run: navigation-frame velocity, attitude,
// and the instantaneous sensor biases.
struct TruthPoint {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity_nav = Vec3::Zero();
  Quat attitude = Quat::Identity();
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();
};

struct NeesResult {
  VecX values;           // one entry per filter epoch
  double mean = 0.0;
  double band_lo = 0.0;  // 95% chi-square band for a single 12-dof sample
  double band_hi = 0.0;
  double frac_in_band = 0.0;
};

// e' P^-1 e with e the true error of each post-update state. Runs must have
// been produced with full covariance storage.
NeesResult nees(const ekf::FilterRun& run, const std::vector<TruthPoint>& truth);

struct GroupSummary {
  double avg_std_aware = 0.0;     // time average of the mean per-axis std
  double avg_std_neglect = 0.0;
  double improvement_pct = 0.0;   // 100 (neglect - aware) / neglect
  double final_std_aware = 0.0;   // summed per-axis std at the final epoch
  double final_std_neglect = 0.0;
  double final_improvement_pct = 0.0;
};

struct UncertaintyReport {
  std::array<GroupSummary, 4> groups;  // velocity, misalignment, accel bias, gyro bias
  static const std::array<const char*, 4>& group_names();
};

// Side-by-side covariance comparison of runs that share an epoch schedule.
UncertaintyReport uncertainty_summary(const ekf::FilterRun& aware,
                                      const ekf::FilterRun& neglect);

}  // namespace navfuse::metrics
