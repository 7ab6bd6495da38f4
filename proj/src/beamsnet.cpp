#include "navfuse/beamsnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "navfuse/errors.hpp"

namespace navfuse::net {

namespace {

using json = nlohmann::json;

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

MatX normalize_window(const MatX& x, const Vec3& mean, const Vec3& std) {
  MatX out = x;
  for (int c = 0; c < 3; ++c) {
    out.col(c) = (out.col(c).array() - mean(c)) / std(c);
  }
  return out;
}

// Unrolled window for the convolution GEMM: row t holds the kernel taps
// [x(t, :), x(t+1, :), ...] so conv_pre = unrolled * w' + b.
MatX im2col(const MatX& x, int kernel) {
  const int positions = static_cast<int>(x.rows()) - kernel + 1;
  const int channels = static_cast<int>(x.cols());
  MatX out(positions, kernel * channels);
  for (int t = 0; t < positions; ++t) {
    for (int k = 0; k < kernel; ++k) {
      out.block(t, k * channels, 1, channels) = x.row(t + k);
    }
  }
  return out;
}

struct BatchCache {
  std::vector<MatX> cols_accel, cols_gyro;  // im2col per sample
  std::vector<MatX> pre_accel, pre_gyro;    // conv pre-activations
  MatX z;        // concatenated rectified conv features, D x B
  MatX z_used;   // after dropout (equals z at inference)
  MatX mask;     // dropout mask, empty when unused
  std::vector<MatX> fc_pre;  // pre-activations per dense layer
  std::vector<MatX> fc_act;  // rectified activations per dense layer
  MatX head_in;  // [last activation; side input]
  MatX side;     // normalized side input
  MatX out;      // 3 x B
};

void check_input_shape(const NetworkParams& p, const WindowedInput& in) {
  if (in.accel.rows() != p.window || in.accel.cols() != 3) {
    throw DataError("network input: accel window must be " +
                    std::to_string(p.window) + " x 3");
  }
  if (in.gyro.rows() != p.window || in.gyro.cols() != 3) {
    throw DataError("network input: gyro window must be " +
                    std::to_string(p.window) + " x 3");
  }
}

void forward_batch(const NetworkParams& p,
                   const std::vector<const WindowedInput*>& batch,
                   bool training, std::mt19937_64* rng, BatchCache& cache) {
  const int b = static_cast<int>(batch.size());
  const int features = p.features_per_branch();
  const int d = 2 * features;

  cache.cols_accel.resize(b);
  cache.cols_gyro.resize(b);
  cache.pre_accel.resize(b);
  cache.pre_gyro.resize(b);
  cache.z.resize(d, b);
  cache.side.resize(p.head_side_inputs(), b);

  for (int i = 0; i < b; ++i) {
    const WindowedInput& in = *batch[i];
    check_input_shape(p, in);

    cache.cols_accel[i] =
        im2col(normalize_window(in.accel, p.norm.accel_mean, p.norm.accel_std),
               p.conv_accel.kernel);
    cache.cols_gyro[i] =
        im2col(normalize_window(in.gyro, p.norm.gyro_mean, p.norm.gyro_std),
               p.conv_gyro.kernel);

    cache.pre_accel[i] =
        (cache.cols_accel[i] * p.conv_accel.w.transpose()).rowwise() +
        p.conv_accel.b.transpose();
    cache.pre_gyro[i] =
        (cache.cols_gyro[i] * p.conv_gyro.w.transpose()).rowwise() +
        p.conv_gyro.b.transpose();

    const MatX act_a = cache.pre_accel[i].cwiseMax(0.0);
    const MatX act_g = cache.pre_gyro[i].cwiseMax(0.0);
    cache.z.col(i).head(features) =
        Eigen::Map<const VecX>(act_a.data(), features);
    cache.z.col(i).tail(features) =
        Eigen::Map<const VecX>(act_g.data(), features);

    VecX side(p.head_side_inputs());
    if (p.raw_beams_head) {
      side = in.raw_beams;
    } else {
      side = in.ls_velocity;
    }
    cache.side.col(i) =
        (side - p.norm.head_mean).cwiseQuotient(p.norm.head_std);
  }

  if (training && p.dropout > 0.0) {
    if (rng == nullptr) {
      throw std::invalid_argument("training forward needs an rng for dropout");
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    cache.mask.resize(d, b);
    const double keep = 1.0 - p.dropout;
    for (int j = 0; j < b; ++j) {
      for (int i = 0; i < d; ++i) {
        cache.mask(i, j) = u(*rng) < keep ? 1.0 / keep : 0.0;
      }
    }
    cache.z_used = cache.z.cwiseProduct(cache.mask);
  } else {
    cache.mask.resize(0, 0);
    cache.z_used = cache.z;
  }

  const std::size_t n_fc = p.fc.size();
  cache.fc_pre.resize(n_fc);
  cache.fc_act.resize(n_fc);
  const MatX* x = &cache.z_used;
  for (std::size_t l = 0; l < n_fc; ++l) {
    cache.fc_pre[l] = (p.fc[l].w * (*x)).colwise() + p.fc[l].b;
    cache.fc_act[l] = cache.fc_pre[l].cwiseMax(0.0);
    x = &cache.fc_act[l];
  }

  cache.head_in.resize(x->rows() + cache.side.rows(), b);
  cache.head_in.topRows(x->rows()) = *x;
  cache.head_in.bottomRows(cache.side.rows()) = cache.side;
  cache.out = (p.head.w * cache.head_in).colwise() + p.head.b;
}

Gradients make_zero_gradients(const NetworkParams& p) {
  Gradients g;
  g.conv_accel = p.conv_accel;
  g.conv_accel.w.setZero();
  g.conv_accel.b.setZero();
  g.conv_gyro = p.conv_gyro;
  g.conv_gyro.w.setZero();
  g.conv_gyro.b.setZero();
  g.fc.resize(p.fc.size());
  for (std::size_t l = 0; l < p.fc.size(); ++l) {
    g.fc[l].w = MatX::Zero(p.fc[l].w.rows(), p.fc[l].w.cols());
    g.fc[l].b = VecX::Zero(p.fc[l].b.size());
  }
  g.head.w = MatX::Zero(p.head.w.rows(), p.head.w.cols());
  g.head.b = VecX::Zero(p.head.b.size());
  return g;
}

// Gradients of mean(|out - y|^2 / 3) over the batch.
Gradients backward_batch(const NetworkParams& p, const BatchCache& cache,
                         const std::vector<Vec3>& targets, double* loss_out) {
  const int b = static_cast<int>(targets.size());
  const int features = p.features_per_branch();

  MatX d_out(3, b);
  double loss = 0.0;
  for (int i = 0; i < b; ++i) {
    const Vec3 r = cache.out.col(i) - targets[i];
    loss += r.squaredNorm();
    d_out.col(i) = 2.0 * r / (3.0 * b);
  }
  loss /= 3.0 * b;
  if (loss_out != nullptr) *loss_out = loss;

  Gradients g = make_zero_gradients(p);

  g.head.w = d_out * cache.head_in.transpose();
  g.head.b = d_out.rowwise().sum();
  const int last_rows = static_cast<int>(cache.head_in.rows()) -
                        static_cast<int>(cache.side.rows());
  MatX d_act = (p.head.w.transpose() * d_out).topRows(last_rows);

  for (int l = static_cast<int>(p.fc.size()) - 1; l >= 0; --l) {
    const MatX d_pre = d_act.cwiseProduct(
        (cache.fc_pre[l].array() > 0.0).cast<double>().matrix());
    const MatX& input =
        l == 0 ? cache.z_used : cache.fc_act[static_cast<std::size_t>(l - 1)];
    g.fc[static_cast<std::size_t>(l)].w = d_pre * input.transpose();
    g.fc[static_cast<std::size_t>(l)].b = d_pre.rowwise().sum();
    d_act = p.fc[static_cast<std::size_t>(l)].w.transpose() * d_pre;
  }

  MatX d_z = cache.mask.size() > 0 ? d_act.cwiseProduct(cache.mask).eval()
                                   : std::move(d_act);

  const int positions = p.window - p.conv_accel.kernel + 1;
  for (int i = 0; i < b; ++i) {
    const Eigen::Map<const MatX> d_flat_a(d_z.col(i).head(features).data(),
                                          positions,
                                          p.conv_accel.out_channels);
    const Eigen::Map<const MatX> d_flat_g(d_z.col(i).tail(features).data(),
                                          positions, p.conv_gyro.out_channels);
    const MatX d_pre_a = d_flat_a.cwiseProduct(
        (cache.pre_accel[i].array() > 0.0).cast<double>().matrix());
    const MatX d_pre_g = d_flat_g.cwiseProduct(
        (cache.pre_gyro[i].array() > 0.0).cast<double>().matrix());
    g.conv_accel.w += d_pre_a.transpose() * cache.cols_accel[i];
    g.conv_accel.b += d_pre_a.colwise().sum().transpose();
    g.conv_gyro.w += d_pre_g.transpose() * cache.cols_gyro[i];
    g.conv_gyro.b += d_pre_g.colwise().sum().transpose();
  }
  return g;
}

std::vector<MatX*> weight_tensors(NetworkParams& p) {
  std::vector<MatX*> out = {&p.conv_accel.w, &p.conv_gyro.w};
  for (auto& l : p.fc) out.push_back(&l.w);
  out.push_back(&p.head.w);
  return out;
}

std::vector<VecX*> bias_tensors(NetworkParams& p) {
  std::vector<VecX*> out = {&p.conv_accel.b, &p.conv_gyro.b};
  for (auto& l : p.fc) out.push_back(&l.b);
  out.push_back(&p.head.b);
  return out;
}

std::vector<MatX*> weight_tensors(Gradients& g) {
  std::vector<MatX*> out = {&g.conv_accel.w, &g.conv_gyro.w};
  for (auto& l : g.fc) out.push_back(&l.w);
  out.push_back(&g.head.w);
  return out;
}

std::vector<VecX*> bias_tensors(Gradients& g) {
  std::vector<VecX*> out = {&g.conv_accel.b, &g.conv_gyro.b};
  for (auto& l : g.fc) out.push_back(&l.b);
  out.push_back(&g.head.b);
  return out;
}

struct AdamState {
  Gradients m;
  Gradients v;
  int t = 0;
};

void adam_step(NetworkParams& params, Gradients& grads, AdamState& state,
               double lr) {
  ++state.t;
  const double c1 = 1.0 - std::pow(kAdamBeta1, state.t);
  const double c2 = 1.0 - std::pow(kAdamBeta2, state.t);

  auto update = [&](auto& p, auto& g, auto& m, auto& v) {
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * g;
    v = (kAdamBeta2 * v.array() + (1.0 - kAdamBeta2) * g.array().square())
            .matrix();
    p.array() -=
        lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kAdamEps);
  };

  auto pw = weight_tensors(params);
  auto gw = weight_tensors(grads);
  auto mw = weight_tensors(state.m);
  auto vw = weight_tensors(state.v);
  for (std::size_t i = 0; i < pw.size(); ++i) {
    update(*pw[i], *gw[i], *mw[i], *vw[i]);
  }
  auto pb = bias_tensors(params);
  auto gb = bias_tensors(grads);
  auto mb = bias_tensors(state.m);
  auto vb = bias_tensors(state.v);
  for (std::size_t i = 0; i < pb.size(); ++i) {
    update(*pb[i], *gb[i], *mb[i], *vb[i]);
  }
}

void validate_train_config(const TrainConfig& c) {
  if (c.epochs < 1 || c.batch < 1 || c.patience < 1 || c.window < 1 ||
      c.conv_filters < 1 || c.conv_kernel < 1 || c.hidden.empty()) {
    throw std::invalid_argument("train config: counts must be positive");
  }
  if (c.conv_kernel > c.window) {
    throw std::invalid_argument("train config: kernel exceeds the window");
  }
  if (!(c.learning_rate > 0.0)) {
    throw std::invalid_argument("train config: learning rate must be positive");
  }
  if (!(c.val_fraction > 0.0) || !(c.val_fraction < 1.0)) {
    throw std::invalid_argument("train config: val fraction in (0, 1)");
  }
  if (c.dropout < 0.0 || c.dropout >= 1.0) {
    throw std::invalid_argument("train config: dropout in [0, 1)");
  }
  for (int h : c.hidden) {
    if (h < 1) throw std::invalid_argument("train config: hidden sizes >= 1");
  }
}

NetworkParams init_params(const TrainConfig& c, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  auto fill = [&](MatX& m, double std) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index col = 0; col < m.cols(); ++col) {
        m(r, col) = std * n01(rng);
      }
    }
  };

  NetworkParams p;
  p.window = c.window;
  p.dropout = c.dropout;
  p.raw_beams_head = c.raw_beams_head;
  p.train_seed = c.seed;

  auto make_conv = [&]() {
    Conv1dLayer layer;
    layer.in_channels = 3;
    layer.out_channels = c.conv_filters;
    layer.kernel = c.conv_kernel;
    layer.w.resize(layer.out_channels, layer.kernel * layer.in_channels);
    fill(layer.w, std::sqrt(2.0 / (layer.kernel * layer.in_channels)));
    layer.b = VecX::Zero(layer.out_channels);
    return layer;
  };
  p.conv_accel = make_conv();
  p.conv_gyro = make_conv();

  int fan_in = 2 * p.features_per_branch();
  for (int h : c.hidden) {
    DenseLayer l;
    l.w.resize(h, fan_in);
    fill(l.w, std::sqrt(2.0 / fan_in));
    l.b = VecX::Zero(h);
    p.fc.push_back(std::move(l));
    fan_in = h;
  }
  DenseLayer head;
  head.w.resize(3, fan_in + p.head_side_inputs());
  fill(head.w, std::sqrt(1.0 / (fan_in + p.head_side_inputs())));
  head.b = VecX::Zero(3);
  p.head = std::move(head);

  p.norm.head_mean = VecX::Zero(p.head_side_inputs());
  p.norm.head_std = VecX::Ones(p.head_side_inputs());
  return p;
}

Normalizer fit_normalizer(const NetworkParams& p,
                          const std::vector<TrainingSample>& dataset,
                          const std::vector<int>& train_idx) {
  Normalizer norm;
  norm.head_mean = VecX::Zero(p.head_side_inputs());
  norm.head_std = VecX::Ones(p.head_side_inputs());

  Vec3 a_sum = Vec3::Zero(), a_sq = Vec3::Zero();
  Vec3 g_sum = Vec3::Zero(), g_sq = Vec3::Zero();
  VecX s_sum = VecX::Zero(p.head_side_inputs());
  VecX s_sq = VecX::Zero(p.head_side_inputs());
  double rows = 0.0;

  for (int idx : train_idx) {
    const WindowedInput& in = dataset[static_cast<std::size_t>(idx)].input;
    for (int c = 0; c < 3; ++c) {
      a_sum(c) += in.accel.col(c).sum();
      a_sq(c) += in.accel.col(c).squaredNorm();
      g_sum(c) += in.gyro.col(c).sum();
      g_sq(c) += in.gyro.col(c).squaredNorm();
    }
    rows += static_cast<double>(in.accel.rows());
    VecX side(p.head_side_inputs());
    if (p.raw_beams_head) {
      side = in.raw_beams;
    } else {
      side = in.ls_velocity;
    }
    s_sum += side;
    s_sq += side.cwiseProduct(side);
  }

  const double n_samples = static_cast<double>(train_idx.size());
  for (int c = 0; c < 3; ++c) {
    norm.accel_mean(c) = a_sum(c) / rows;
    norm.accel_std(c) = std::max(
        1e-9, std::sqrt(std::max(0.0, a_sq(c) / rows -
                                          norm.accel_mean(c) * norm.accel_mean(c))));
    norm.gyro_mean(c) = g_sum(c) / rows;
    norm.gyro_std(c) = std::max(
        1e-9, std::sqrt(std::max(0.0, g_sq(c) / rows -
                                          norm.gyro_mean(c) * norm.gyro_mean(c))));
  }
  for (int c = 0; c < p.head_side_inputs(); ++c) {
    norm.head_mean(c) = s_sum(c) / n_samples;
    norm.head_std(c) = std::max(
        1e-9,
        std::sqrt(std::max(0.0, s_sq(c) / n_samples -
                                    norm.head_mean(c) * norm.head_mean(c))));
  }
  return norm;
}

double eval_loss(const NetworkParams& p,
                 const std::vector<TrainingSample>& dataset,
                 const std::vector<int>& idx, int batch) {
  BatchCache cache;
  double total = 0.0;
  for (std::size_t start = 0; start < idx.size();
       start += static_cast<std::size_t>(batch)) {
    const std::size_t end =
        std::min(idx.size(), start + static_cast<std::size_t>(batch));
    std::vector<const WindowedInput*> inputs;
    std::vector<Vec3> targets;
    for (std::size_t i = start; i < end; ++i) {
      inputs.push_back(&dataset[static_cast<std::size_t>(idx[i])].input);
      targets.push_back(dataset[static_cast<std::size_t>(idx[i])].target);
    }
    forward_batch(p, inputs, false, nullptr, cache);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      total += (cache.out.col(static_cast<Eigen::Index>(i)) - targets[i])
                   .squaredNorm();
    }
  }
  return total / (3.0 * static_cast<double>(idx.size()));
}

json matrix_to_json(const MatX& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

MatX matrix_from_json(const json& j, const std::string& name) {
  if (!j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    throw DataError("parameter archive: malformed matrix in " + name);
  }
  const auto rows = j["rows"].get<Eigen::Index>();
  const auto cols = j["cols"].get<Eigen::Index>();
  const auto& data = j["data"];
  if (rows < 0 || cols < 0 ||
      data.size() != static_cast<std::size_t>(rows * cols)) {
    throw DataError("parameter archive: size mismatch in " + name);
  }
  MatX m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++].get<double>();
  }
  return m;
}

VecX vector_from_json(const json& j, const std::string& name) {
  VecX v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  if (v.size() == 0) throw DataError("parameter archive: empty vector " + name);
  return v;
}

}  // namespace

Vec3 forward(const NetworkParams& params, const WindowedInput& input) {
  BatchCache cache;
  forward_batch(params, {&input}, false, nullptr, cache);
  return cache.out.col(0);
}

double loss_mse(const std::vector<Vec3>& predictions,
                const std::vector<Vec3>& targets) {
  if (predictions.empty() || predictions.size() != targets.size()) {
    throw std::invalid_argument(
        "loss_mse: prediction/target lists must match and be nonempty");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += (predictions[i] - targets[i]).squaredNorm();
  }
  return total / (3.0 * static_cast<double>(predictions.size()));
}

Gradients backward(const NetworkParams& params,
                   const std::vector<const WindowedInput*>& batch,
                   const std::vector<Vec3>& targets, double* loss_out) {
  if (batch.empty() || batch.size() != targets.size()) {
    throw std::invalid_argument("backward: batch/target sizes must match");
  }
  BatchCache cache;
  forward_batch(params, batch, false, nullptr, cache);
  return backward_batch(params, cache, targets, loss_out);
}

TrainResult train(const std::vector<TrainingSample>& dataset,
                  const TrainConfig& config,
                  const NetworkParams* resume_from) {
  validate_train_config(config);
  const int window = resume_from != nullptr ? resume_from->window
                                            : config.window;
  const int n = static_cast<int>(dataset.size());
  const int n_val = std::max(1, static_cast<int>(std::lround(
                                    n * config.val_fraction)));
  if (n - n_val < config.batch) {
    throw std::invalid_argument(
        "train: dataset too small for the requested batch and split");
  }
  for (const auto& s : dataset) {
    if (s.input.accel.rows() != window || s.input.gyro.rows() != window ||
        s.input.accel.cols() != 3 || s.input.gyro.cols() != 3) {
      throw DataError("train: sample window shape does not match the config");
    }
  }

  std::mt19937_64 rng(config.seed);
  NetworkParams params =
      resume_from != nullptr ? *resume_from : init_params(config, rng);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> val_idx(order.begin(), order.begin() + n_val);
  std::vector<int> train_idx(order.begin() + n_val, order.end());

  // A fresh model learns its input scaling from the training split; a
  // resumed one keeps the representation it was trained with.
  if (resume_from == nullptr) {
    params.norm = fit_normalizer(params, dataset, train_idx);
  }

  AdamState adam;
  adam.m = make_zero_gradients(params);
  adam.v = make_zero_gradients(params);

  TrainResult result;
  NetworkParams best = params;
  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;

  BatchCache cache;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double epoch_loss = 0.0;
    std::size_t seen = 0;

    for (std::size_t start = 0; start < train_idx.size();
         start += static_cast<std::size_t>(config.batch)) {
      const std::size_t end = std::min(
          train_idx.size(), start + static_cast<std::size_t>(config.batch));
      std::vector<const WindowedInput*> inputs;
      std::vector<Vec3> targets;
      for (std::size_t i = start; i < end; ++i) {
        const auto& s = dataset[static_cast<std::size_t>(train_idx[i])];
        inputs.push_back(&s.input);
        targets.push_back(s.target);
      }
      forward_batch(params, inputs, true, &rng, cache);
      double batch_loss = 0.0;
      Gradients grads = backward_batch(params, cache, targets, &batch_loss);
      adam_step(params, grads, adam, config.learning_rate);

      epoch_loss += batch_loss * static_cast<double>(targets.size());
      seen += targets.size();

      if (!std::isfinite(batch_loss)) {
        throw NumericalError("training diverged: non-finite loss",
                             {static_cast<double>(epoch), batch_loss});
      }
    }

    const double train_loss = epoch_loss / static_cast<double>(seen);
    const double val_loss = eval_loss(params, dataset, val_idx, config.batch);
    result.history.train_loss.push_back(train_loss);
    result.history.val_loss.push_back(val_loss);
    if (!std::isfinite(val_loss)) {
      throw NumericalError("training diverged: non-finite validation loss",
                           {static_cast<double>(epoch), val_loss});
    }

    if (val_loss < best_val) {
      best_val = val_loss;
      best = params;
      result.history.best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
      if (stale >= config.patience) break;
    }
  }

  // Per-axis validation residual spread, reported as the effective
  // measurement sigma of the trained estimator.
  BatchCache val_cache;
  Vec3 sq = Vec3::Zero();
  for (int idx : val_idx) {
    const auto& s = dataset[static_cast<std::size_t>(idx)];
    forward_batch(best, {&s.input}, false, nullptr, val_cache);
    const Vec3 r = Vec3(val_cache.out.col(0)) - s.target;
    sq += r.cwiseProduct(r);
  }
  best.residual_sigma = (sq / static_cast<double>(n_val)).cwiseSqrt();

  result.params = std::move(best);
  return result;
}

void WindowBuffer::push(const ins::ImuSample& sample) {
  accel_.push_back(sample.specific_force);
  gyro_.push_back(sample.angular_rate);
  const std::size_t cap = static_cast<std::size_t>(window_);
  if (accel_.size() > cap) {
    accel_.erase(accel_.begin(), accel_.end() - static_cast<long>(cap));
    gyro_.erase(gyro_.begin(), gyro_.end() - static_cast<long>(cap));
  }
}

MatX WindowBuffer::accel_matrix() const {
  if (!ready()) throw DataError("window buffer is not yet full");
  MatX m(window_, 3);
  for (int t = 0; t < window_; ++t) m.row(t) = accel_[accel_.size() - window_ + t];
  return m;
}

MatX WindowBuffer::gyro_matrix() const {
  if (!ready()) throw DataError("window buffer is not yet full");
  MatX m(window_, 3);
  for (int t = 0; t < window_; ++t) m.row(t) = gyro_[gyro_.size() - window_ + t];
  return m;
}

std::optional<Measurement> infer_measurement(
    const NetworkParams& params, const WindowBuffer& buffer, const Vec4& beams,
    const dvl::BeamGeometry& geometry) {
  if (!buffer.ready() || buffer.window() != params.window) {
    return std::nullopt;
  }
  WindowedInput input;
  input.accel = buffer.accel_matrix();
  input.gyro = buffer.gyro_matrix();
  input.raw_beams = beams;
  dvl::DvlBeams b;
  b.along_beam = beams;
  input.ls_velocity = dvl::ls_velocity(geometry, b);

  Measurement m;
  m.velocity_body = forward(params, input);
  m.r = params.residual_sigma.cwiseProduct(params.residual_sigma).asDiagonal();
  return m;
}

void save_params(const std::string& path, const NetworkParams& p) {
  auto conv_to_json = [&](const Conv1dLayer& l) {
    return json{{"in_channels", l.in_channels},
                {"out_channels", l.out_channels},
                {"kernel", l.kernel},
                {"w", matrix_to_json(l.w)},
                {"b", std::vector<double>(l.b.data(), l.b.data() + l.b.size())}};
  };
  auto dense_to_json = [&](const DenseLayer& l) {
    return json{{"w", matrix_to_json(l.w)},
                {"b", std::vector<double>(l.b.data(), l.b.data() + l.b.size())}};
  };

  json j;
  j["format"] = "beamsnet-params-v1";
  j["window"] = p.window;
  j["dropout"] = p.dropout;
  j["raw_beams_head"] = p.raw_beams_head;
  j["train_seed"] = p.train_seed;
  j["residual_sigma"] = {p.residual_sigma(0), p.residual_sigma(1),
                         p.residual_sigma(2)};
  j["conv_accel"] = conv_to_json(p.conv_accel);
  j["conv_gyro"] = conv_to_json(p.conv_gyro);
  j["fc"] = json::array();
  for (const auto& l : p.fc) j["fc"].push_back(dense_to_json(l));
  j["head"] = dense_to_json(p.head);
  j["normalizer"] = {
      {"accel_mean", {p.norm.accel_mean(0), p.norm.accel_mean(1), p.norm.accel_mean(2)}},
      {"accel_std", {p.norm.accel_std(0), p.norm.accel_std(1), p.norm.accel_std(2)}},
      {"gyro_mean", {p.norm.gyro_mean(0), p.norm.gyro_mean(1), p.norm.gyro_mean(2)}},
      {"gyro_std", {p.norm.gyro_std(0), p.norm.gyro_std(1), p.norm.gyro_std(2)}},
      {"head_mean",
       std::vector<double>(p.norm.head_mean.data(),
                           p.norm.head_mean.data() + p.norm.head_mean.size())},
      {"head_std",
       std::vector<double>(p.norm.head_std.data(),
                           p.norm.head_std.data() + p.norm.head_std.size())}};

  std::ofstream out(path);
  if (!out) throw DataError("cannot write parameter archive: " + path);
  out << j.dump(1) << "\n";
}

NetworkParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read parameter archive: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("parameter archive is not valid JSON: " +
                    std::string(e.what()));
  }
  if (!j.contains("format") || j["format"] != "beamsnet-params-v1") {
    throw DataError("parameter archive: unsupported format tag");
  }

  NetworkParams p;
  p.window = j.at("window").get<int>();
  p.dropout = j.at("dropout").get<double>();
  p.raw_beams_head = j.at("raw_beams_head").get<bool>();
  p.train_seed = j.at("train_seed").get<std::uint64_t>();
  const auto rs = j.at("residual_sigma");
  p.residual_sigma = Vec3(rs[0].get<double>(), rs[1].get<double>(),
                          rs[2].get<double>());

  auto conv_from_json = [&](const json& cj, const std::string& name) {
    Conv1dLayer l;
    l.in_channels = cj.at("in_channels").get<int>();
    l.out_channels = cj.at("out_channels").get<int>();
    l.kernel = cj.at("kernel").get<int>();
    l.w = matrix_from_json(cj.at("w"), name);
    l.b = vector_from_json(cj.at("b"), name);
    if (l.in_channels != 3 || l.kernel < 1 || l.kernel > p.window ||
        l.w.rows() != l.out_channels ||
        l.w.cols() != l.kernel * l.in_channels ||
        l.b.size() != l.out_channels) {
      throw DataError("parameter archive: inconsistent shapes in " + name);
    }
    return l;
  };
  p.conv_accel = conv_from_json(j.at("conv_accel"), "conv_accel");
  p.conv_gyro = conv_from_json(j.at("conv_gyro"), "conv_gyro");
  if (p.conv_gyro.out_channels != p.conv_accel.out_channels ||
      p.conv_gyro.kernel != p.conv_accel.kernel) {
    throw DataError("parameter archive: branch shapes disagree");
  }

  int fan_in = 2 * p.features_per_branch();
  for (std::size_t i = 0; i < j.at("fc").size(); ++i) {
    const std::string name = "fc[" + std::to_string(i) + "]";
    DenseLayer l;
    l.w = matrix_from_json(j["fc"][i].at("w"), name);
    l.b = vector_from_json(j["fc"][i].at("b"), name);
    if (l.w.cols() != fan_in || l.b.size() != l.w.rows()) {
      throw DataError("parameter archive: inconsistent shapes in " + name);
    }
    fan_in = static_cast<int>(l.w.rows());
    p.fc.push_back(std::move(l));
  }
  if (p.fc.empty()) throw DataError("parameter archive: empty dense stack");

  p.head.w = matrix_from_json(j.at("head").at("w"), "head");
  p.head.b = vector_from_json(j.at("head").at("b"), "head");
  if (p.head.w.rows() != 3 ||
      p.head.w.cols() != fan_in + p.head_side_inputs() ||
      p.head.b.size() != 3) {
    throw DataError("parameter archive: inconsistent shapes in head");
  }

  const auto& nj = j.at("normalizer");
  auto vec3_of = [&](const json& a) {
    return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
  };
  p.norm.accel_mean = vec3_of(nj.at("accel_mean"));
  p.norm.accel_std = vec3_of(nj.at("accel_std"));
  p.norm.gyro_mean = vec3_of(nj.at("gyro_mean"));
  p.norm.gyro_std = vec3_of(nj.at("gyro_std"));
  p.norm.head_mean = vector_from_json(nj.at("head_mean"), "normalizer");
  p.norm.head_std = vector_from_json(nj.at("head_std"), "normalizer");
  if (p.norm.head_mean.size() != p.head_side_inputs() ||
      p.norm.head_std.size() != p.head_side_inputs()) {
    throw DataError("parameter archive: normalizer size mismatch");
  }
  return p;
}

}  // namespace navfuse::net
