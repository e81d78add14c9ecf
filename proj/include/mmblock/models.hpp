#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mmblock/nn/layers.hpp"
#include "mmblock/sample.hpp"

namespace mmblock {

/// RSSI input scaling shared by all models: each per-beam power p becomes
/// (10 log10(max(p, 1e-12)) - db_mean) / db_std.
struct InputNormalization {
  double db_mean = 0.0;
  double db_std = 1.0;

  friend bool operator==(const InputNormalization&, const InputNormalization&) = default;
};

InputNormalization fit_normalization(const DatasetFile& d, Split split);
std::vector<nn::Vector> rssi_features(std::span<const RssiFrame> window,
                                      const InputNormalization& norm);

/// LiDAR branch input: 1 x bins signal of 1 - depth / max_range (0 = nothing in range).
nn::Tensor2 lidar_features(std::span<const double> depth, double max_range);

// ---------------------------------------------------------------------------

/// Proposed predictor: LSTM over the RSSI window, then dense(H->20, ReLU) and
/// dense(20->2N, ReLU). Outputs are future (x, y) pairs flattened x1,y1,...,xN,yN and
/// normalized by the road-region extent, so 0..1 spans the road.
struct RfLocalizationModel {
  nn::LstmParams lstm;
  nn::DenseParams dense1;
  nn::DenseParams dense2;
  long horizon = 5;
  long t0 = 8;
  InputNormalization norm;
  double extent_x = 1.0;  // road-region width, meters
  double extent_y = 1.0;  // road-region height, meters
  Vec2 road_origin;       // road-region lower-left corner, transmitter-local

  int num_beams() const { return static_cast<int>(lstm.input_size); }
  friend bool operator==(const RfLocalizationModel&, const RfLocalizationModel&) = default;
};

RfLocalizationModel make_localization_model(int num_beams, long horizon, std::uint64_t seed,
                                            std::size_t hidden = 32, std::size_t dense = 20);

/// Raw (normalized) 2N head output.
nn::Vector localization_forward(const RfLocalizationModel& m, std::span<const nn::Vector> features);

/// N future locations in the road frame, meters. Centroid t is window end + h.
std::vector<Centroid> predict_locations(const RfLocalizationModel& m,
                                        std::span<const RssiFrame> window);

/// Mean Huber loss against a normalized 2N target; accumulates gradients when grad != null.
double localization_loss(const RfLocalizationModel& m, std::span<const nn::Vector> features,
                         std::span<const double> target, double delta, RfLocalizationModel* grad);

/// Normalized 2N regression target for a sample.
nn::Vector localization_target(const RfLocalizationModel& m, const LabeledSample& s);

// ---------------------------------------------------------------------------

/// RSSI-only blockage baseline: stacked LSTM (4 x 16) then dense(16->20, ReLU) and
/// dense(20->N) with sigmoid outputs.
struct RfBlockageModel {
  std::vector<nn::LstmParams> lstm;
  nn::DenseParams dense1;
  nn::DenseParams dense2;
  long horizon = 5;
  long t0 = 8;
  InputNormalization norm;

  int num_beams() const { return static_cast<int>(lstm.front().input_size); }
  friend bool operator==(const RfBlockageModel&, const RfBlockageModel&) = default;
};

RfBlockageModel make_rf_blockage_model(int num_beams, long horizon, std::uint64_t seed,
                                       std::size_t hidden = 16, std::size_t layers = 4,
                                       std::size_t dense = 20);

/// Per-horizon logits.
nn::Vector rf_blockage_forward(const RfBlockageModel& m, std::span<const nn::Vector> features);

double rf_blockage_loss(const RfBlockageModel& m, std::span<const nn::Vector> features,
                        std::span<const double> target, RfBlockageModel* grad);

// ---------------------------------------------------------------------------

/// Multimodal baseline. LiDAR branch: conv(1->8, k5, s2, ReLU), conv(8->16, k5, s2,
/// ReLU), global average pool. RSSI branch: stacked LSTM (2 x 16). The two feature
/// vectors are concatenated and mapped by one dense layer to N sigmoid outputs.
struct RfLidarBlockageModel {
  nn::Conv1dParams conv1;
  nn::Conv1dParams conv2;
  std::vector<nn::LstmParams> lstm;
  nn::DenseParams head;
  long horizon = 5;
  long t0 = 8;
  int lidar_bins = 360;
  double lidar_max_range = 16.0;
  InputNormalization norm;

  int num_beams() const { return static_cast<int>(lstm.front().input_size); }
  friend bool operator==(const RfLidarBlockageModel&, const RfLidarBlockageModel&) = default;
};

RfLidarBlockageModel make_rf_lidar_blockage_model(int num_beams, long horizon, int lidar_bins,
                                                  double lidar_max_range, std::uint64_t seed,
                                                  std::size_t hidden = 16, std::size_t layers = 2);

nn::Vector rf_lidar_blockage_forward(const RfLidarBlockageModel& m,
                                     std::span<const nn::Vector> features,
                                     const nn::Tensor2& lidar);

double rf_lidar_blockage_loss(const RfLidarBlockageModel& m, std::span<const nn::Vector> features,
                              const nn::Tensor2& lidar, std::span<const double> target,
                              RfLidarBlockageModel* grad);

// ---------------------------------------------------------------------------

using BlockageModel = std::variant<RfBlockageModel, RfLidarBlockageModel>;
using AnyModel = std::variant<RfLocalizationModel, RfBlockageModel, RfLidarBlockageModel>;

/// N blockage probabilities for one sample.
nn::Vector blockage_probabilities(const BlockageModel& m, const LabeledSample& s);

nn::ParamViews parameters(RfLocalizationModel& m);
nn::ParamViews parameters(RfBlockageModel& m);
nn::ParamViews parameters(RfLidarBlockageModel& m);

/// Same architecture with every parameter zeroed; the gradient container.
RfLocalizationModel zeros_like(const RfLocalizationModel& m);
RfBlockageModel zeros_like(const RfBlockageModel& m);
RfLidarBlockageModel zeros_like(const RfLidarBlockageModel& m);

// ---------------------------------------------------------------------------
// Training

/// Defaults are the published hyperparameters. One episode is `iterations` Adam
/// steps on minibatches drawn uniformly with replacement from the train split.
struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 8;
  long episodes = 10;
  long iterations = 100;
  std::uint64_t seed = 0;
  double delta = 1.0;  // Huber threshold (localization only)
  long horizon = 0;    // expected N; 0 accepts the dataset's
  bool parallel = true;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Per-iteration mean minibatch loss and per-episode mean validation loss (NaN when the
/// validation split is empty).
struct LossCurve {
  std::vector<double> train;
  std::vector<double> validation;
};

enum class BlockageVariant { rf_only, rf_lidar };

struct LocalizationTraining {
  RfLocalizationModel model;
  LossCurve curve;
};

struct BlockageTraining {
  BlockageModel model;
  LossCurve curve;
};

LocalizationTraining train_localization(const DatasetFile& d, const TrainConfig& cfg);
BlockageTraining train_blockage(const DatasetFile& d, const TrainConfig& cfg,
                                BlockageVariant variant);

}  // namespace mmblock
