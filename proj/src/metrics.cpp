#include "navfuse/metrics.hpp"

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "navfuse/errors.hpp"

namespace navfuse::metrics {

namespace {

void check_pair(const VecX& reference, const VecX& estimate) {
  if (reference.size() == 0 || reference.size() != estimate.size()) {
    throw std::invalid_argument(
        "metrics: series must be nonempty and equally sized");
  }
}

double variance(const VecX& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / v.size();
}

}  // namespace

double rmse(const VecX& reference, const VecX& estimate) {
  check_pair(reference, estimate);
  return std::sqrt((reference - estimate).squaredNorm() / reference.size());
}

double mae(const VecX& reference, const VecX& estimate) {
  check_pair(reference, estimate);
  return (reference - estimate).cwiseAbs().mean();
}

double r_squared(const VecX& reference, const VecX& estimate) {
  check_pair(reference, estimate);
  const double mean = reference.mean();
  const double ss_tot = (reference.array() - mean).square().sum();
  if (ss_tot <= 0.0) {
    throw std::invalid_argument("r_squared: reference series is constant");
  }
  return 1.0 - (reference - estimate).squaredNorm() / ss_tot;
}

double vaf(const VecX& reference, const VecX& estimate) {
  check_pair(reference, estimate);
  const double var_ref = variance(reference);
  if (var_ref <= 0.0) {
    throw std::invalid_argument("vaf: reference series is constant");
  }
  return 100.0 * (1.0 - variance(reference - estimate) / var_ref);
}

VecX norm_series(const std::vector<Vec3>& v) {
  VecX out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i].norm();
  return out;
}

VecX axis_series(const std::vector<Vec3>& v, int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0..2");
  VecX out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i](axis);
  return out;
}

double chi2_quantile(double dof, double p) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(dist, p);
}

NeesResult nees(const ekf::FilterRun& run,
                const std::vector<TruthPoint>& truth) {
  if (run.epochs.empty()) throw DataError("nees: run has no epochs");
  if (truth.size() != run.epochs.size()) {
    throw DataError("nees: truth points must match the epoch schedule");
  }

  NeesResult out;
  out.values.resize(static_cast<Eigen::Index>(run.epochs.size()));
  out.band_lo = chi2_quantile(12.0, 0.025);
  out.band_hi = chi2_quantile(12.0, 0.975);

  int in_band = 0;
  for (std::size_t k = 0; k < run.epochs.size(); ++k) {
    const auto& ep = run.epochs[k];
    const auto& tp = truth[k];
    if (std::abs(ep.time - tp.time) > 1e-6) {
      throw DataError("nees: truth timestamp mismatch");
    }
    if (ep.p_full.isZero(0.0)) {
      throw DataError("nees: run lacks full covariance storage");
    }

    Vec12 e;
    e.segment<3>(ekf::kVelErr) = tp.velocity_nav - ep.nav.velocity;
    e.segment<3>(ekf::kMisalign) =
        rot_log(tp.attitude * ep.nav.attitude.conjugate());
    e.segment<3>(ekf::kAccelBiasErr) = tp.accel_bias - ep.nav.accel_bias;
    e.segment<3>(ekf::kGyroBiasErr) = tp.gyro_bias - ep.nav.gyro_bias;

    const Vec12 solved = ep.p_full.ldlt().solve(e);
    const double v = e.dot(solved);
    out.values(static_cast<Eigen::Index>(k)) = v;
    if (v >= out.band_lo && v <= out.band_hi) ++in_band;
  }
  out.mean = out.values.mean();
  out.frac_in_band = static_cast<double>(in_band) / run.epochs.size();
  return out;
}

const std::array<const char*, 4>& UncertaintyReport::group_names() {
  static const std::array<const char*, 4> names = {
      "velocity", "misalignment", "accel_bias", "gyro_bias"};
  return names;
}

UncertaintyReport uncertainty_summary(const ekf::FilterRun& aware,
                                      const ekf::FilterRun& neglect) {
  if (aware.epochs.empty() || aware.epochs.size() != neglect.epochs.size()) {
    throw DataError(
        "uncertainty_summary: runs must share a nonempty epoch schedule");
  }
  for (std::size_t k = 0; k < aware.epochs.size(); ++k) {
    if (std::abs(aware.epochs[k].time - neglect.epochs[k].time) > 1e-9) {
      throw DataError("uncertainty_summary: epoch schedules differ");
    }
  }

  UncertaintyReport report;
  for (int g = 0; g < 4; ++g) {
    const int offset = 3 * g;
    auto group_stats = [&](const ekf::FilterRun& run, double& avg_std,
                           double& final_std) {
      double acc = 0.0;
      for (const auto& ep : run.epochs) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a) {
          s += std::sqrt(std::max(0.0, ep.p_diag(offset + a)));
        }
        acc += s / 3.0;
      }
      avg_std = acc / run.epochs.size();
      final_std = 0.0;
      for (int a = 0; a < 3; ++a) {
        final_std +=
            std::sqrt(std::max(0.0, run.epochs.back().p_diag(offset + a)));
      }
    };

    GroupSummary& gs = report.groups[g];
    group_stats(aware, gs.avg_std_aware, gs.final_std_aware);
    group_stats(neglect, gs.avg_std_neglect, gs.final_std_neglect);
    if (gs.avg_std_neglect <= 0.0 || gs.final_std_neglect <= 0.0) {
      throw NumericalError(
          "uncertainty_summary: reference run has vanishing uncertainty");
    }
    gs.improvement_pct =
        100.0 * (gs.avg_std_neglect - gs.avg_std_aware) / gs.avg_std_neglect;
    gs.final_improvement_pct = 100.0 *
                               (gs.final_std_neglect - gs.final_std_aware) /
                               gs.final_std_neglect;
  }
  return report;
}

}  // namespace navfuse::metrics
