#include "mmblock/models.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mmblock/kernels.hpp"
#include "mmblock/nn/adam.hpp"
#include "mmblock/nn/loss.hpp"
#include "mmblock/scene.hpp"

namespace mmblock {

using nn::Vector;

namespace {

constexpr double kPowerFloor = 1e-12;
constexpr double kOutputBias = 0.5;  // middle of the normalized target range

double to_db(double p) { return 10.0 * std::log10(std::max(p, kPowerFloor)); }

void check_window(std::span<const RssiFrame> window, long t0, int beams) {
  if (static_cast<long>(window.size()) != t0)
    throw Error(ErrorKind::shape_mismatch, "window has " + std::to_string(window.size()) +
                                               " frames, model expects " + std::to_string(t0));
  for (const auto& f : window)
    if (static_cast<int>(f.powers.size()) != beams)
      throw Error(ErrorKind::shape_mismatch, "frame has " + std::to_string(f.powers.size()) +
                                                 " beams, model expects " + std::to_string(beams));
}

}  // namespace

InputNormalization fit_normalization(const DatasetFile& d, Split split) {
  double sum = 0.0, sum2 = 0.0;
  std::size_t n = 0;
  for (auto i : d.indices(split)) {
    for (const auto& f : d.samples[i].window) {
      for (double p : f.powers) {
        const double v = to_db(p);
        sum += v;
        sum2 += v * v;
        ++n;
      }
    }
  }
  if (n == 0) return {};
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(sum2 / static_cast<double>(n) - mean * mean, 0.0);
  return {mean, var > 1e-12 ? std::sqrt(var) : 1.0};
}

std::vector<Vector> rssi_features(std::span<const RssiFrame> window, const InputNormalization& norm) {
  std::vector<Vector> out;
  out.reserve(window.size());
  for (const auto& f : window) {
    Vector v(f.powers.size());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = (to_db(f.powers[m]) - norm.db_mean) / norm.db_std;
    out.push_back(std::move(v));
  }
  return out;
}

nn::Tensor2 lidar_features(std::span<const double> depth, double max_range) {
  nn::Tensor2 out(1, depth.size());
  for (std::size_t k = 0; k < depth.size(); ++k)
    out(0, k) = 1.0 - std::min(depth[k], max_range) / max_range;
  return out;
}

// Localization ----------------------------------------------------------------

RfLocalizationModel make_localization_model(int num_beams, long horizon, std::uint64_t seed,
                                            std::size_t hidden, std::size_t dense) {
  if (num_beams < 1 || horizon < 1)
    throw Error(ErrorKind::invalid_argument, "model needs num_beams >= 1 and horizon >= 1");
  std::mt19937_64 rng(seed);
  RfLocalizationModel m;
  m.lstm = nn::make_lstm(static_cast<std::size_t>(num_beams), hidden, rng);
  m.dense1 = nn::make_dense(hidden, dense, rng);
  m.dense2 = nn::make_dense(dense, 2 * static_cast<std::size_t>(horizon), rng);
  // Outputs pass through a ReLU; a negative initial bias can leave a unit dead for good.
  std::fill(m.dense2.bias.begin(), m.dense2.bias.end(), kOutputBias);
  m.horizon = horizon;
  return m;
}

namespace {

struct LocalizationPass {
  nn::LstmResult lstm;
  Vector a1;
  Vector a2;
};

LocalizationPass localization_pass(const RfLocalizationModel& m, std::span<const Vector> features) {
  LocalizationPass p;
  p.lstm = nn::lstm_forward(m.lstm, features);
  p.a1 = nn::dense_forward(m.dense1, p.lstm.h);
  nn::relu_inplace(p.a1);
  p.a2 = nn::dense_forward(m.dense2, p.a1);
  nn::relu_inplace(p.a2);
  return p;
}

}  // namespace

Vector localization_forward(const RfLocalizationModel& m, std::span<const Vector> features) {
  return localization_pass(m, features).a2;
}

std::vector<Centroid> predict_locations(const RfLocalizationModel& m,
                                        std::span<const RssiFrame> window) {
  check_window(window, m.t0, m.num_beams());
  const auto out = localization_forward(m, rssi_features(window, m.norm));
  std::vector<Centroid> locs;
  for (long h = 0; h < m.horizon; ++h) {
    const auto k = static_cast<std::size_t>(2 * h);
    locs.push_back({window.back().t + h + 1, out[k] * m.extent_x, out[k + 1] * m.extent_y, true});
  }
  return locs;
}

Vector localization_target(const RfLocalizationModel& m, const LabeledSample& s) {
  if (static_cast<long>(s.future.size()) != m.horizon)
    throw Error(ErrorKind::length_mismatch, "sample has " + std::to_string(s.future.size()) +
                                                " future locations, model predicts " +
                                                std::to_string(m.horizon));
  Vector target;
  for (const auto& c : s.future) {
    target.push_back(c.x / m.extent_x);
    target.push_back(c.y / m.extent_y);
  }
  return target;
}

double localization_loss(const RfLocalizationModel& m, std::span<const Vector> features,
                         std::span<const double> target, double delta, RfLocalizationModel* grad) {
  const auto p = localization_pass(m, features);
  auto loss = nn::huber_loss(p.a2, target, delta);
  if (grad) {
    Vector d2 = std::move(loss.grad);
    nn::relu_backward_inplace(p.a2, d2);
    Vector d1(p.a1.size());
    nn::dense_backward(m.dense2, p.a1, d2, grad->dense2, d1);
    nn::relu_backward_inplace(p.a1, d1);
    Vector dh(p.lstm.h.size());
    nn::dense_backward(m.dense1, p.lstm.h, d1, grad->dense1, dh);
    std::vector<Vector> d_hidden(p.lstm.hidden.size(), Vector(dh.size(), 0.0));
    d_hidden.back() = dh;
    nn::lstm_backward(m.lstm, p.lstm.cache, d_hidden, grad->lstm, nullptr);
  }
  return loss.loss;
}

// RF blockage -----------------------------------------------------------------

RfBlockageModel make_rf_blockage_model(int num_beams, long horizon, std::uint64_t seed,
                                       std::size_t hidden, std::size_t layers, std::size_t dense) {
  if (num_beams < 1 || horizon < 1 || layers < 1)
    throw Error(ErrorKind::invalid_argument, "model needs num_beams, horizon and layers >= 1");
  std::mt19937_64 rng(seed);
  RfBlockageModel m;
  for (std::size_t l = 0; l < layers; ++l)
    m.lstm.push_back(nn::make_lstm(l == 0 ? static_cast<std::size_t>(num_beams) : hidden, hidden, rng));
  m.dense1 = nn::make_dense(hidden, dense, rng);
  m.dense2 = nn::make_dense(dense, static_cast<std::size_t>(horizon), rng);
  m.horizon = horizon;
  return m;
}

namespace {

struct RfBlockagePass {
  nn::StackedLstmResult lstm;
  Vector a1;
  Vector logits;
};

RfBlockagePass rf_blockage_pass(const RfBlockageModel& m, std::span<const Vector> features) {
  RfBlockagePass p;
  p.lstm = nn::stacked_lstm_forward(m.lstm, features);
  p.a1 = nn::dense_forward(m.dense1, p.lstm.h());
  nn::relu_inplace(p.a1);
  p.logits = nn::dense_forward(m.dense2, p.a1);
  return p;
}

Vector sigmoid_all(const Vector& logits) {
  Vector out(logits.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = nn::sigmoid(logits[i]);
  return out;
}

}  // namespace

Vector rf_blockage_forward(const RfBlockageModel& m, std::span<const Vector> features) {
  return rf_blockage_pass(m, features).logits;
}

double rf_blockage_loss(const RfBlockageModel& m, std::span<const Vector> features,
                        std::span<const double> target, RfBlockageModel* grad) {
  const auto p = rf_blockage_pass(m, features);
  auto loss = nn::bce_loss(sigmoid_all(p.logits), target);
  if (grad) {
    Vector d1(p.a1.size());
    nn::dense_backward(m.dense2, p.a1, loss.grad, grad->dense2, d1);
    nn::relu_backward_inplace(p.a1, d1);
    Vector dh(p.lstm.h().size());
    nn::dense_backward(m.dense1, p.lstm.h(), d1, grad->dense1, dh);
    nn::stacked_lstm_backward(m.lstm, p.lstm, dh, grad->lstm);
  }
  return loss.loss;
}

// RF + LiDAR blockage ---------------------------------------------------------

RfLidarBlockageModel make_rf_lidar_blockage_model(int num_beams, long horizon, int lidar_bins,
                                                  double lidar_max_range, std::uint64_t seed,
                                                  std::size_t hidden, std::size_t layers) {
  if (num_beams < 1 || horizon < 1 || layers < 1 || lidar_bins < 1)
    throw Error(ErrorKind::invalid_argument, "invalid multimodal model dimensions");
  std::mt19937_64 rng(seed);
  RfLidarBlockageModel m;
  m.conv1 = nn::make_conv1d(1, 8, 5, 2, rng);
  m.conv2 = nn::make_conv1d(8, 16, 5, 2, rng);
  if (static_cast<std::size_t>(lidar_bins) < m.conv1.kernel ||
      m.conv1.output_length(static_cast<std::size_t>(lidar_bins)) < m.conv2.kernel)
    throw Error(ErrorKind::invalid_argument, "lidar_bins too small for the convolution branch");
  for (std::size_t l = 0; l < layers; ++l)
    m.lstm.push_back(nn::make_lstm(l == 0 ? static_cast<std::size_t>(num_beams) : hidden, hidden, rng));
  m.head = nn::make_dense(m.conv2.out_channels + hidden, static_cast<std::size_t>(horizon), rng);
  m.horizon = horizon;
  m.lidar_bins = lidar_bins;
  m.lidar_max_range = lidar_max_range;
  return m;
}

namespace {

struct RfLidarPass {
  nn::Tensor2 c1;
  nn::Tensor2 c2;
  Vector pooled;
  nn::StackedLstmResult lstm;
  Vector joint;
  Vector logits;
};

RfLidarPass rf_lidar_pass(const RfLidarBlockageModel& m, std::span<const Vector> features,
                          const nn::Tensor2& lidar) {
  RfLidarPass p;
  p.c1 = nn::conv1d_forward(m.conv1, lidar);
  nn::relu_inplace(p.c1.flat());
  p.c2 = nn::conv1d_forward(m.conv2, p.c1);
  nn::relu_inplace(p.c2.flat());
  p.pooled = nn::global_avg_pool(p.c2);
  p.lstm = nn::stacked_lstm_forward(m.lstm, features);
  p.joint = p.pooled;
  p.joint.insert(p.joint.end(), p.lstm.h().begin(), p.lstm.h().end());
  p.logits = nn::dense_forward(m.head, p.joint);
  return p;
}

}  // namespace

Vector rf_lidar_blockage_forward(const RfLidarBlockageModel& m, std::span<const Vector> features,
                                 const nn::Tensor2& lidar) {
  return rf_lidar_pass(m, features, lidar).logits;
}

double rf_lidar_blockage_loss(const RfLidarBlockageModel& m, std::span<const Vector> features,
                              const nn::Tensor2& lidar, std::span<const double> target,
                              RfLidarBlockageModel* grad) {
  const auto p = rf_lidar_pass(m, features, lidar);
  auto loss = nn::bce_loss(sigmoid_all(p.logits), target);
  if (grad) {
    Vector d_joint(p.joint.size());
    nn::dense_backward(m.head, p.joint, loss.grad, grad->head, d_joint);
    const std::size_t n_pool = p.pooled.size();
    const std::span<const double> d_pool(d_joint.data(), n_pool);
    const std::span<const double> d_h(d_joint.data() + n_pool, d_joint.size() - n_pool);
    nn::stacked_lstm_backward(m.lstm, p.lstm, d_h, grad->lstm);
    auto d_c2 = nn::global_avg_pool_backward(d_pool, p.c2.cols());
    nn::relu_backward_inplace(p.c2.flat(), d_c2.flat());
    nn::Tensor2 d_c1;
    nn::conv1d_backward(m.conv2, p.c1, d_c2, grad->conv2, &d_c1);
    nn::relu_backward_inplace(p.c1.flat(), d_c1.flat());
    nn::conv1d_backward(m.conv1, lidar, d_c1, grad->conv1, nullptr);
  }
  return loss.loss;
}

// Shared ----------------------------------------------------------------------

Vector blockage_probabilities(const BlockageModel& model, const LabeledSample& s) {
  return std::visit(
      [&](const auto& m) -> Vector {
        using M = std::decay_t<decltype(m)>;
        check_window(s.window, m.t0, m.num_beams());
        const auto features = rssi_features(s.window, m.norm);
        if constexpr (std::is_same_v<M, RfBlockageModel>) {
          return sigmoid_all(rf_blockage_forward(m, features));
        } else {
          if (static_cast<int>(s.lidar_depth.size()) != m.lidar_bins)
            throw Error(ErrorKind::shape_mismatch, "lidar raster width differs from the model's");
          return sigmoid_all(
              rf_lidar_blockage_forward(m, features, lidar_features(s.lidar_depth, m.lidar_max_range)));
        }
      },
      model);
}

nn::ParamViews parameters(RfLocalizationModel& m) {
  nn::ParamViews v;
  nn::collect(m.lstm, v);
  nn::collect(m.dense1, v);
  nn::collect(m.dense2, v);
  return v;
}

nn::ParamViews parameters(RfBlockageModel& m) {
  nn::ParamViews v;
  for (auto& l : m.lstm) nn::collect(l, v);
  nn::collect(m.dense1, v);
  nn::collect(m.dense2, v);
  return v;
}

nn::ParamViews parameters(RfLidarBlockageModel& m) {
  nn::ParamViews v;
  nn::collect(m.conv1, v);
  nn::collect(m.conv2, v);
  for (auto& l : m.lstm) nn::collect(l, v);
  nn::collect(m.head, v);
  return v;
}

namespace {

template <class Model>
Model zeroed(const Model& m) {
  Model z = m;
  for (auto view : parameters(z)) std::fill(view.begin(), view.end(), 0.0);
  return z;
}

template <class Model>
void accumulate(Model& into, Model& from, double scale) {
  auto dst = parameters(into);
  auto src = parameters(from);
  for (std::size_t k = 0; k < dst.size(); ++k)
    for (std::size_t i = 0; i < dst[k].size(); ++i) dst[k][i] += scale * src[k][i];
}

/// loss_fn(model, sample_index, grad_or_null) -> per-sample loss
template <class Model, class LossFn>
LossCurve run_training(Model& model, const std::vector<std::size_t>& train,
                       const std::vector<std::size_t>& validation, const TrainConfig& cfg,
                       LossFn&& loss_fn) {
  if (cfg.batch_size < 1 || cfg.episodes < 1 || cfg.iterations < 1 || !(cfg.lr > 0.0))
    throw Error(ErrorKind::invalid_argument, "training config values must be positive");
  nn::AdamState adam;
  adam.lr = cfg.lr;
  std::mt19937_64 rng(mix_seed(cfg.seed, 0x62617463ULL));
  std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
  LossCurve curve;
  const std::size_t B = cfg.batch_size;
  std::vector<std::size_t> batch(B);
  std::vector<double> losses(B);
  for (long ep = 0; ep < cfg.episodes; ++ep) {
    for (long it = 0; it < cfg.iterations; ++it) {
      for (auto& b : batch) b = train[pick(rng)];
      std::vector<Model> grads(B, zeroed(model));
      auto body = [&](std::size_t b) { losses[b] = loss_fn(model, batch[b], &grads[b]); };
      if (cfg.parallel)
        kernels::parallel_for(B, body);
      else
        kernels::serial_for(B, body);
      Model total = zeroed(model);
      double mean_loss = 0.0;
      for (std::size_t b = 0; b < B; ++b) {
        accumulate(total, grads[b], 1.0 / static_cast<double>(B));
        mean_loss += losses[b] / static_cast<double>(B);
      }
      nn::adam_step(adam, parameters(model), parameters(total));
      curve.train.push_back(mean_loss);
    }
    if (validation.empty()) {
      curve.validation.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    std::vector<double> val(validation.size());
    auto body = [&](std::size_t k) { val[k] = loss_fn(model, validation[k], nullptr); };
    if (cfg.parallel)
      kernels::parallel_for(val.size(), body);
    else
      kernels::serial_for(val.size(), body);
    double mean = 0.0;
    for (double v : val) mean += v / static_cast<double>(val.size());
    curve.validation.push_back(mean);
  }
  return curve;
}

void check_dataset(const DatasetFile& d, const TrainConfig& cfg) {
  if (cfg.horizon != 0 && cfg.horizon != d.meta.horizon)
    throw Error(ErrorKind::config_mismatch, "dataset horizon N=" + std::to_string(d.meta.horizon) +
                                                " but model expects N=" + std::to_string(cfg.horizon));
  if (d.indices(Split::train).empty())
    throw Error(ErrorKind::empty_split, "dataset has no training samples");
  for (const auto& s : d.samples) {
    if (static_cast<long>(s.future.size()) != d.meta.horizon ||
        static_cast<long>(s.future_blocked.size()) != d.meta.horizon)
      throw Error(ErrorKind::length_mismatch,
                  "sample at t=" + std::to_string(s.t) + " has a label vector of the wrong length");
    check_window(s.window, d.meta.t0, d.meta.num_beams);
  }
}

std::vector<std::vector<Vector>> all_features(const DatasetFile& d, const InputNormalization& norm) {
  std::vector<std::vector<Vector>> out(d.samples.size());
  kernels::parallel_for(out.size(),
                        [&](std::size_t i) { out[i] = rssi_features(d.samples[i].window, norm); });
  return out;
}

Vector blocked_target(const LabeledSample& s) {
  return Vector(s.future_blocked.begin(), s.future_blocked.end());
}

}  // namespace

RfLocalizationModel zeros_like(const RfLocalizationModel& m) { return zeroed(m); }
RfBlockageModel zeros_like(const RfBlockageModel& m) { return zeroed(m); }
RfLidarBlockageModel zeros_like(const RfLidarBlockageModel& m) { return zeroed(m); }

LocalizationTraining train_localization(const DatasetFile& d, const TrainConfig& cfg) {
  check_dataset(d, cfg);
  LocalizationTraining out;
  auto& model = out.model;
  model = make_localization_model(d.meta.num_beams, d.meta.horizon, mix_seed(cfg.seed, 1));
  model.t0 = d.meta.t0;
  model.norm = fit_normalization(d, Split::train);
  model.extent_x = d.meta.road_region.width();
  model.extent_y = d.meta.road_region.height();
  model.road_origin = {d.meta.road_region.xmin, d.meta.road_region.ymin};

  const auto features = all_features(d, model.norm);
  std::vector<Vector> targets(d.samples.size());
  for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = localization_target(model, d.samples[i]);

  out.curve = run_training(model, d.indices(Split::train), d.indices(Split::validation), cfg,
                           [&](const RfLocalizationModel& m, std::size_t i, RfLocalizationModel* g) {
                             return localization_loss(m, features[i], targets[i], cfg.delta, g);
                           });
  return out;
}

BlockageTraining train_blockage(const DatasetFile& d, const TrainConfig& cfg,
                                BlockageVariant variant) {
  check_dataset(d, cfg);
  const auto norm = fit_normalization(d, Split::train);
  const auto features = all_features(d, norm);
  std::vector<Vector> targets(d.samples.size());
  for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = blocked_target(d.samples[i]);
  const auto train = d.indices(Split::train);
  const auto val = d.indices(Split::validation);

  if (variant == BlockageVariant::rf_only) {
    auto model = make_rf_blockage_model(d.meta.num_beams, d.meta.horizon, mix_seed(cfg.seed, 2));
    model.t0 = d.meta.t0;
    model.norm = norm;
    auto curve = run_training(model, train, val, cfg,
                              [&](const RfBlockageModel& m, std::size_t i, RfBlockageModel* g) {
                                return rf_blockage_loss(m, features[i], targets[i], g);
                              });
    return {std::move(model), std::move(curve)};
  }

  auto model = make_rf_lidar_blockage_model(d.meta.num_beams, d.meta.horizon, d.meta.lidar_bins,
                                            d.meta.lidar_max_range, mix_seed(cfg.seed, 3));
  model.t0 = d.meta.t0;
  model.norm = norm;
  std::vector<nn::Tensor2> lidar(d.samples.size());
  for (std::size_t i = 0; i < lidar.size(); ++i) {
    if (static_cast<int>(d.samples[i].lidar_depth.size()) != d.meta.lidar_bins)
      throw Error(ErrorKind::shape_mismatch, "lidar raster width differs from dataset metadata");
    lidar[i] = lidar_features(d.samples[i].lidar_depth, d.meta.lidar_max_range);
  }
  auto curve = run_training(model, train, val, cfg,
                            [&](const RfLidarBlockageModel& m, std::size_t i, RfLidarBlockageModel* g) {
                              return rf_lidar_blockage_loss(m, features[i], lidar[i], targets[i], g);
                            });
  return {std::move(model), std::move(curve)};
}

}  // namespace mmblock
