#pragma once

#include <random>

#include <Eigen/QR>

#include "navfuse/linalg.hpp"

namespace helpers {

using navfuse::MatX;
using navfuse::VecX;

// Symmetric matrix with eigenvalues drawn uniformly from [lo, hi].
inline MatX random_psd(int n, std::mt19937_64& rng, double lo = 0.1,
                       double hi = 10.0) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> ev(lo, hi);
  MatX a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = n01(rng);
  const MatX q = Eigen::HouseholderQR<MatX>(a).householderQ();
  VecX d(n);
  for (int i = 0; i < n; ++i) d(i) = ev(rng);
  return q * d.asDiagonal() * q.transpose();
}

inline VecX random_vec(int n, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> n01(0.0, sigma);
  VecX v(n);
  for (int i = 0; i < n; ++i) v(i) = n01(rng);
  return v;
}

// Joseph-form Kalman update, the numerically safe reference for the
// uncorrelated case.
struct KalmanReference {
  MatX gain;
  MatX p_post;
};

inline KalmanReference joseph_update(const MatX& p, const MatX& h,
                                     const MatX& r) {
  const MatX s = h * p * h.transpose() + r;
  KalmanReference out;
  out.gain = p * h.transpose() * s.inverse();
  const MatX ikh = MatX::Identity(p.rows(), p.cols()) - out.gain * h;
  out.p_post = ikh * p * ikh.transpose() + out.gain * r * out.gain.transpose();
  return out;
}

}  // namespace helpers
