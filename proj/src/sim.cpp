#include "navfuse/sim.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "navfuse/errors.hpp"

namespace navfuse::sim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Heading schedule: straight legs joined by turns whose rate ramps up and
// down with a raised cosine, so the angular rate is continuous everywhere.
struct TurnSegment {
  double start = 0.0;
  double duration = 0.0;
  double rate = 0.0;  // signed peak rate
  double ramp = 0.0;
  double heading_before = 0.0;
};

// Integral of the raised-cosine-shaped rate profile from segment start.
double turn_angle(const TurnSegment& seg, double tau) {
  const double r = seg.ramp;
  const double flat_end = seg.duration - r;
  auto ramp_area = [&](double u) {
    // integral of 0.5 (1 - cos(pi u / r)) du
    return 0.5 * (u - r / std::numbers::pi * std::sin(std::numbers::pi * u / r));
  };
  double area = 0.0;
  if (tau <= 0.0) return 0.0;
  if (tau < r) {
    area = ramp_area(tau);
  } else if (tau < flat_end) {
    area = ramp_area(r) + (tau - r);
  } else {
    const double tail = std::min(tau, seg.duration) - flat_end;
    area = ramp_area(r) + (flat_end - r) + (ramp_area(r) - ramp_area(r - tail));
  }
  return seg.rate * area;
}

double turn_rate(const TurnSegment& seg, double tau) {
  const double r = seg.ramp;
  if (tau <= 0.0 || tau >= seg.duration) return 0.0;
  if (tau < r) {
    return seg.rate * 0.5 * (1.0 - std::cos(std::numbers::pi * tau / r));
  }
  if (tau > seg.duration - r) {
    const double u = seg.duration - tau;
    return seg.rate * 0.5 * (1.0 - std::cos(std::numbers::pi * u / r));
  }
  return seg.rate;
}

class HeadingModel {
 public:
  HeadingModel(const TrajectoryProfile& p) : profile_(p) {
    if (p.kind == TrajectoryKind::kLawnmower ||
        p.kind == TrajectoryKind::kRacetrack) {
      build_turns();
    }
  }

  double heading(double t) const {
    const auto& p = profile_;
    switch (p.kind) {
      case TrajectoryKind::kStraight:
        return p.initial_heading_rad;
      case TrajectoryKind::kSinusoidHeading:
        return p.initial_heading_rad +
               p.heading_amplitude_rad * std::sin(kTwoPi * t / p.heading_period_s);
      default:
        break;
    }
    double chi = p.initial_heading_rad;
    for (const auto& seg : turns_) {
      if (t <= seg.start) break;
      chi += turn_angle(seg, t - seg.start);
    }
    return chi;
  }

  double rate(double t) const {
    const auto& p = profile_;
    switch (p.kind) {
      case TrajectoryKind::kStraight:
        return 0.0;
      case TrajectoryKind::kSinusoidHeading:
        return p.heading_amplitude_rad * kTwoPi / p.heading_period_s *
               std::cos(kTwoPi * t / p.heading_period_s);
      default:
        break;
    }
    for (const auto& seg : turns_) {
      if (t >= seg.start && t < seg.start + seg.duration) {
        return turn_rate(seg, t - seg.start);
      }
    }
    return 0.0;
  }

 private:
  void build_turns() {
    const auto& p = profile_;
    const double leg = p.leg_length_m / p.speed_mps;
    const double turn_len =
        std::numbers::pi / p.turn_rate_radps + p.turn_ramp_s;
    double t = leg;
    int n = 0;
    while (t < p.duration_s) {
      TurnSegment seg;
      seg.start = t;
      seg.duration = turn_len;
      seg.ramp = p.turn_ramp_s;
      const bool alternate = p.kind == TrajectoryKind::kLawnmower;
      seg.rate = (alternate && (n % 2 == 1)) ? -p.turn_rate_radps
                                             : p.turn_rate_radps;
      turns_.push_back(seg);
      t += turn_len + leg;
      ++n;
    }
  }

  TrajectoryProfile profile_;
  std::vector<TurnSegment> turns_;
};

void validate_profile(const TrajectoryProfile& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
  if (!(p.duration_s > 0.0))
    throw std::invalid_argument("sim: duration must be positive");
  if (p.speed_mps < 0.0)
    throw std::invalid_argument("sim: speed must be nonnegative");
  if (p.kind == TrajectoryKind::kLawnmower ||
      p.kind == TrajectoryKind::kRacetrack) {
    if (!(p.leg_length_m > 0.0) || !(p.turn_rate_radps > 0.0) ||
        !(p.turn_ramp_s > 0.0) || !(p.speed_mps > 0.0)) {
      throw std::invalid_argument(
          "sim: leg length, turn rate, ramp and speed must be positive for "
          "surveys with turns");
    }
  }
  if (p.kind == TrajectoryKind::kSinusoidHeading && !(p.heading_period_s > 0.0))
    throw std::invalid_argument("sim: heading period must be positive");
  if (p.depth_amplitude_m != 0.0 && !(p.depth_period_s > 0.0))
    throw std::invalid_argument("sim: depth period must be positive");
  if (p.speed_mod_fraction != 0.0 && !(p.speed_mod_period_s > 0.0))
    throw std::invalid_argument("sim: speed modulation period must be positive");
  if (p.speed_mod_fraction < 0.0 || p.speed_mod_fraction >= 1.0)
    throw std::invalid_argument("sim: speed modulation fraction in [0, 1)");
}

}  // namespace

Vec3 SensorTruth::velocity_body(std::size_t boundary_index) const {
  return attitude.at(boundary_index).conjugate() * velocity.at(boundary_index);
}

std::size_t SensorTruth::boundary_index(double time) const {
  const auto idx = static_cast<std::size_t>(std::llround(time / dt));
  if (idx >= times.size() || std::abs(times[idx] - time) > 1e-6) {
    throw DataError("sim: time does not land on a truth boundary");
  }
  return idx;
}

SensorTruth generate(const TrajectoryProfile& profile, double dt,
                     double gravity) {
  validate_profile(profile, dt);
  const auto n = static_cast<std::size_t>(std::llround(profile.duration_s / dt));
  if (n < 2) throw std::invalid_argument("sim: duration spans fewer than 2 steps");

  HeadingModel heading(profile);

  auto speed = [&](double t) {
    double s = profile.speed_mps;
    if (profile.speed_mod_fraction != 0.0) {
      s *= 1.0 + profile.speed_mod_fraction *
                     std::sin(kTwoPi * t / profile.speed_mod_period_s);
    }
    return s;
  };
  auto speed_dot = [&](double t) {
    if (profile.speed_mod_fraction == 0.0) return 0.0;
    return profile.speed_mps * profile.speed_mod_fraction * kTwoPi /
           profile.speed_mod_period_s *
           std::cos(kTwoPi * t / profile.speed_mod_period_s);
  };
  auto depth_dot = [&](double t) {
    if (profile.depth_amplitude_m == 0.0) return 0.0;
    return profile.depth_amplitude_m * kTwoPi / profile.depth_period_s *
           std::cos(kTwoPi * t / profile.depth_period_s);
  };
  auto depth_ddot = [&](double t) {
    if (profile.depth_amplitude_m == 0.0) return 0.0;
    const double w = kTwoPi / profile.depth_period_s;
    return -profile.depth_amplitude_m * w * w * std::sin(w * t);
  };

  auto velocity_at = [&](double t) {
    const double chi = heading.heading(t);
    const double s = speed(t);
    return Vec3(s * std::cos(chi), s * std::sin(chi), depth_dot(t));
  };
  auto accel_at = [&](double t) {
    const double chi = heading.heading(t);
    const double chid = heading.rate(t);
    const double s = speed(t);
    const double sd = speed_dot(t);
    return Vec3(sd * std::cos(chi) - s * std::sin(chi) * chid,
                sd * std::sin(chi) + s * std::cos(chi) * chid, depth_ddot(t));
  };

  SensorTruth out;
  out.dt = dt;
  out.gravity = gravity;
  out.times.resize(n + 1);
  out.position.resize(n + 1);
  out.velocity.resize(n + 1);
  out.attitude.resize(n + 1);
  out.f_body.resize(n);
  out.w_body.resize(n);

  const Vec3 g_n(0.0, 0.0, gravity);
  Vec3 pos(0.0, 0.0, profile.depth_m);

  for (std::size_t k = 0; k <= n; ++k) {
    const double t = k * dt;
    out.times[k] = t;
    out.velocity[k] = velocity_at(t);
    out.attitude[k] =
        Quat(Eigen::AngleAxisd(heading.heading(t), Vec3::UnitZ()));
    out.position[k] = pos;
    if (k < n) {
      // Simpson quadrature keeps the truth position consistent with the
      // analytic velocity to O(dt^4).
      const Vec3 v0 = out.velocity[k];
      const Vec3 vm = velocity_at(t + 0.5 * dt);
      const Vec3 v1 = velocity_at(t + dt);
      pos += dt / 6.0 * (v0 + 4.0 * vm + v1);

      const double tm = t + 0.5 * dt;
      const Quat q_mid(Eigen::AngleAxisd(heading.heading(tm), Vec3::UnitZ()));
      out.f_body[k] = q_mid.conjugate() * (accel_at(tm) - g_n);
      out.w_body[k] = Vec3(0.0, 0.0, heading.rate(tm));
    }
  }
  return out;
}

ImuCorruption corrupt_imu(const SensorTruth& truth,
                          const ekf::NoiseModel& noise, std::uint64_t seed,
                          const Vec3& initial_accel_bias,
                          const Vec3& initial_gyro_bias) {
  noise.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto draw3 = [&](double sigma) {
    return Vec3(sigma * n01(rng), sigma * n01(rng), sigma * n01(rng));
  };

  const std::size_t n = truth.f_body.size();
  ImuCorruption out;
  out.samples.resize(n);
  out.accel_white.resize(n);
  out.gyro_white.resize(n);
  out.accel_bias.resize(n);
  out.gyro_bias.resize(n);

  Vec3 ba = initial_accel_bias;
  Vec3 bg = initial_gyro_bias;
  for (std::size_t k = 0; k < n; ++k) {
    out.accel_white[k] = draw3(noise.accel_sigma);
    out.gyro_white[k] = draw3(noise.gyro_sigma);
    out.accel_bias[k] = ba;
    out.gyro_bias[k] = bg;

    out.samples[k].time = truth.times[k];
    out.samples[k].specific_force = truth.f_body[k] + ba + out.accel_white[k];
    out.samples[k].angular_rate = truth.w_body[k] + bg + out.gyro_white[k];

    ba += draw3(noise.accel_bias_rw);
    bg += draw3(noise.gyro_bias_rw);
  }
  return out;
}

DvlLog emit_dvl(const SensorTruth& truth, const dvl::BeamGeometry& geometry,
                double rate_hz, const DvlCorruption& corruption,
                std::uint64_t seed) {
  if (!(rate_hz > 0.0)) {
    throw std::invalid_argument("emit_dvl: rate must be positive");
  }
  const double period = 1.0 / rate_hz;
  const double step_ratio = period / truth.dt;
  const auto stride = static_cast<std::size_t>(std::llround(step_ratio));
  if (stride < 1 || std::abs(step_ratio - static_cast<double>(stride)) > 1e-9) {
    throw DataError("emit_dvl: sensor period must be a multiple of the IMU step");
  }

  const double lag_ratio = corruption.latency_s / truth.dt;
  const auto lag_steps = static_cast<std::size_t>(std::llround(lag_ratio));
  if (corruption.latency_s < 0.0 ||
      std::abs(lag_ratio - static_cast<double>(lag_steps)) > 1e-9) {
    throw DataError(
        "emit_dvl: latency must be a nonnegative multiple of the IMU step");
  }
  if (lag_steps >= stride) {
    throw DataError("emit_dvl: latency must be shorter than the epoch period");
  }

  std::mt19937_64 rng(seed);
  DvlLog out;
  const std::size_t n_boundaries = truth.times.size();
  for (std::size_t idx = stride; idx < n_boundaries; idx += stride) {
    const Vec3 v_body = truth.velocity_body(idx);
    const Vec4 clean =
        dvl::beams_from_velocity(geometry, truth.velocity_body(idx - lag_steps));
    const Vec4 measured = dvl::corrupt_beams(clean, corruption.bias,
                                             corruption.scale,
                                             corruption.sigma, rng);
    dvl::DvlBeams b;
    b.time = truth.times[idx];
    b.along_beam = measured;
    out.beams.push_back(b);
    out.white_noise.push_back(measured - corruption.scale.cwiseProduct(clean) -
                              corruption.bias);
    out.velocity_body_true.push_back(v_body);
    out.boundary_indices.push_back(idx);
  }
  return out;
}

bool CrossCorrResult::any_significant() const {
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 3; ++j)
      if (significant(i, j)) return true;
  return false;
}

CrossCorrResult empirical_cross_corr(const std::vector<Vec12>& process_noise,
                                     const std::vector<Vec3>& meas_error,
                                     int lag) {
  if (process_noise.size() != meas_error.size()) {
    throw DataError("empirical_cross_corr: sequences must be aligned");
  }
  const int n = static_cast<int>(process_noise.size());
  const int lo = std::max(0, lag);
  const int hi = n + std::min(0, lag);
  const int pairs = hi - lo;
  if (pairs < 8) {
    throw DataError("empirical_cross_corr: too few overlapping pairs");
  }

  Vec12 w_mean = Vec12::Zero();
  Vec3 v_mean = Vec3::Zero();
  for (int k = lo; k < hi; ++k) {
    w_mean += process_noise[k - lag];
    v_mean += meas_error[k];
  }
  w_mean /= pairs;
  v_mean /= pairs;

  Mat12x3 cov = Mat12x3::Zero();
  Vec12 w_var = Vec12::Zero();
  Vec3 v_var = Vec3::Zero();
  for (int k = lo; k < hi; ++k) {
    const Vec12 dw = process_noise[k - lag] - w_mean;
    const Vec3 dv = meas_error[k] - v_mean;
    cov += dw * dv.transpose();
    w_var += dw.cwiseProduct(dw);
    v_var += dv.cwiseProduct(dv);
  }
  cov /= (pairs - 1);
  w_var /= (pairs - 1);
  v_var /= (pairs - 1);

  CrossCorrResult out;
  out.cov = cov;
  out.n_pairs = pairs;
  out.threshold = 3.0 / std::sqrt(static_cast<double>(pairs));
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double denom = std::sqrt(w_var(i) * v_var(j));
      out.corr(i, j) = denom > 0.0 ? cov(i, j) / denom : 0.0;
      out.significant(i, j) = std::abs(out.corr(i, j)) > out.threshold;
    }
  }
  return out;
}

}  // namespace navfuse::sim
