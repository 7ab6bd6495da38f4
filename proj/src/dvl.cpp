#include "navfuse/dvl.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "navfuse/errors.hpp"

namespace navfuse::dvl {

namespace {
constexpr double kConditionLimit = 1e8;
}

BeamGeometry make_geometry(double pitch_rad,
                           const std::array<double, 4>& yaw_rad) {
  if (!(pitch_rad > 0.0) || !(pitch_rad < 0.5 * std::numbers::pi)) {
    throw std::invalid_argument("beam pitch must lie in (0, pi/2), got " +
                                std::to_string(pitch_rad));
  }
  BeamGeometry g;
  g.pitch_rad = pitch_rad;
  g.yaw_rad = yaw_rad;
  const double sp = std::sin(pitch_rad);
  const double cp = std::cos(pitch_rad);
  for (int i = 0; i < 4; ++i) {
    g.directions.row(i) << std::cos(yaw_rad[i]) * sp, std::sin(yaw_rad[i]) * sp,
        cp;
  }
  return g;
}

BeamGeometry default_geometry() {
  const double d = std::numbers::pi / 180.0;
  return make_geometry(20.0 * d, {45.0 * d, 135.0 * d, 225.0 * d, 315.0 * d});
}

Vec4 beams_from_velocity(const BeamGeometry& geometry, const Vec3& v_body) {
  return geometry.directions * v_body;
}

Vec3 ls_velocity(const BeamGeometry& geometry, const DvlBeams& beams) {
  int n_valid = 0;
  for (bool v : beams.valid) n_valid += v ? 1 : 0;
  if (n_valid < 3) {
    throw DataError("velocity unobservable: only " + std::to_string(n_valid) +
                    " valid beams, need at least 3");
  }

  MatX a(n_valid, 3);
  VecX y(n_valid);
  int row = 0;
  for (int i = 0; i < 4; ++i) {
    if (!beams.valid[i]) continue;
    a.row(row) = geometry.directions.row(i);
    y(row) = beams.along_beam(i);
    ++row;
  }

  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > kConditionLimit) {
    throw NumericalError(
        "degenerate beam geometry: condition number exceeds 1e8",
        {sv(0), sv(1), sv(2)});
  }
  return svd.solve(y);
}

Vec4 corrupt_beams(const Vec4& true_beams, const Vec4& bias, const Vec4& scale,
                   double sigma, std::mt19937_64& rng) {
  if (sigma < 0.0) {
    throw std::invalid_argument("beam noise sigma must be nonnegative");
  }
  std::normal_distribution<double> n(0.0, 1.0);
  Vec4 out;
  for (int i = 0; i < 4; ++i) {
    out(i) = scale(i) * true_beams(i) + bias(i) + sigma * n(rng);
  }
  return out;
}

Vec4 corrupt_beams(const Vec4& true_beams, const Vec4& bias, const Vec4& scale,
                   double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return corrupt_beams(true_beams, bias, scale, sigma, rng);
}

}  // namespace navfuse::dvl
