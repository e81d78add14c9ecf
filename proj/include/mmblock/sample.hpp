#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmblock/scene.hpp"
#include "mmblock/types.hpp"

namespace mmblock {

/// One training example: the RSSI window ending at t paired with location labels.
struct LabeledSample {
  std::string scenario;
  long t = 0;
  std::vector<RssiFrame> window;  // frames t-T0+1 .. t
  Centroid label;                 // location at t
  std::vector<Centroid> future;   // locations at t+1 .. t+N, all valid
  std::vector<std::uint8_t> future_blocked;  // b_{t+1} .. b_{t+N} from the RSSI threshold
  std::vector<double> lidar_depth;           // scan t rasterized to polar bins, meters

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

enum class Split : std::uint8_t { train, validation, test };

const char* to_string(Split s);
Split split_from_string(const std::string& s);

struct SplitRatios {
  double train = 0.7;
  double validation = 0.15;
  double test = 0.15;

  friend bool operator==(const SplitRatios&, const SplitRatios&) = default;
};

/// Parameters a consumer must agree with before using the samples.
struct DatasetMeta {
  int version = 1;
  long t0 = 8;
  long horizon = 5;
  int num_beams = 64;
  int lidar_bins = 360;
  double lidar_max_range = 16.0;
  double r0 = 0.0;  // linear total-power threshold used for future_blocked
  double eps = 2.0;
  long min_pts = 4;
  double proximity_radius = 1.0;
  Rect road_region;  // transmitter-local
  Vec2 tx;           // transmitter-local link of the recording scenarios
  Vec2 rx;
  SplitRatios ratios;
  std::vector<std::string> scenarios;

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct DatasetFile {
  DatasetMeta meta;
  std::vector<LabeledSample> samples;
  std::vector<Split> splits;  // parallel to samples

  std::vector<std::size_t> indices(Split s) const;

  friend bool operator==(const DatasetFile&, const DatasetFile&) = default;
};

}  // namespace mmblock
