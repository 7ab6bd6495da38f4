#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "navfuse/dvl.hpp"
#include "navfuse/linalg.hpp"
#include "navfuse/strapdown.hpp"

namespace navfuse::net {

// One-dimensional convolution over the time axis. Each filter spans all
// input channels: w is (out_channels) x (kernel * in_channels), with tap t
// of channel c at column t * in_channels + c. No padding, stride 1.
struct Conv1dLayer {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  MatX w;
  VecX b;
};

struct DenseLayer {
  MatX w;  // out x in
  VecX b;
};

// Fixed affine input scaling, estimated from the training corpus and stored
// with the parameters so inference sees the same representation.
struct Normalizer {
  Vec3 accel_mean = Vec3::Zero();
  Vec3 accel_std = Vec3::Ones();
  Vec3 gyro_mean = Vec3::Zero();
  Vec3 gyro_std = Vec3::Ones();
  VecX head_mean;  // sized to the head side input (3 or 4)
  VecX head_std;
};

// Two parallel convolution branches over the inertial windows feed a dense
// stack; the current sensor velocity joins at the last layer, whose linear
// output is the estimated body velocity.
struct NetworkParams {
  int window = 100;
  Conv1dLayer conv_accel;
  Conv1dLayer conv_gyro;
  std::vector<DenseLayer> fc;  // hidden layers, rectified-linear
  DenseLayer head;             // linear, 3 outputs
  double dropout = 0.2;
  bool raw_beams_head = false;  // feed the 4 raw beam speeds instead of the
                                // resolved velocity
  Normalizer norm;
  Vec3 residual_sigma = Vec3::Zero();  // validation residual std per axis
  std::uint64_t train_seed = 0;

  int features_per_branch() const {
    return conv_accel.out_channels * (window - conv_accel.kernel + 1);
  }
  int head_side_inputs() const { return raw_beams_head ? 4 : 3; }
};

struct WindowedInput {
  MatX accel;  // window x 3, raw specific force
  MatX gyro;   // window x 3, raw angular rate
  Vec3 ls_velocity = Vec3::Zero();
  Vec4 raw_beams = Vec4::Zero();
};

struct TrainingSample {
  WindowedInput input;
  Vec3 target = Vec3::Zero();  // true body velocity
};

struct TrainConfig {
  int epochs = 100;
  int batch = 64;
  double learning_rate = 1e-3;
  int patience = 10;  // early stop after this many epochs without val gain
  double val_fraction = 0.15;
  double dropout = 0.2;
  std::vector<int> hidden = {512, 64};
  int window = 100;
  int conv_filters = 6;
  int conv_kernel = 2;
  bool raw_beams_head = false;
  std::uint64_t seed = 1;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = -1;
};

struct TrainResult {
  NetworkParams params;
  TrainHistory history;
};

// Deterministic inference pass (dropout disabled).
Vec3 forward(const NetworkParams& params, const WindowedInput& input);

// Mean squared error over all axes of all pairs.
double loss_mse(const std::vector<Vec3>& predictions,
                const std::vector<Vec3>& targets);

// Gradient container mirrors the parameter layout.
struct Gradients {
  Conv1dLayer conv_accel;
  Conv1dLayer conv_gyro;
  std::vector<DenseLayer> fc;
  DenseLayer head;
};

// Reverse-mode gradients of the batch MSE with respect to every parameter,
// evaluated with dropout disabled so finite-difference checks are exact.
Gradients backward(const NetworkParams& params,
                   const std::vector<const WindowedInput*>& batch,
                   const std::vector<Vec3>& targets, double* loss_out = nullptr);

// Adam with early stopping on a held-out validation split. When `resume_from`
// is given, optimization continues from those parameters (normalizer and
// architecture included); otherwise the architecture comes from the config.
TrainResult train(const std::vector<TrainingSample>& dataset,
                  const TrainConfig& config,
                  const NetworkParams* resume_from = nullptr);

// Rolling inertial window for online inference.
class WindowBuffer {
 public:
  explicit WindowBuffer(int window) : window_(window) {}
  void push(const ins::ImuSample& sample);
  bool ready() const { return static_cast<int>(accel_.size()) >= window_; }
  int window() const { return window_; }
  MatX accel_matrix() const;
  MatX gyro_matrix() const;

 private:
  int window_;
  std::vector<Vec3> accel_;
  std::vector<Vec3> gyro_;
};

struct Measurement {
  Vec3 velocity_body = Vec3::Zero();
  Mat3 r = Mat3::Zero();
};

// Network velocity for the current epoch, or nullopt while the inertial
// buffer is still warming up (callers fall back to the least-squares path).
std::optional<Measurement> infer_measurement(const NetworkParams& params,
                                             const WindowBuffer& buffer,
                                             const Vec4& beams,
                                             const dvl::BeamGeometry& geometry);

// JSON parameter archive, format tag "beamsnet-params-v1".
void save_params(const std::string& path, const NetworkParams& params);
NetworkParams load_params(const std::string& path);

}  // namespace navfuse::net
