#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmblock/config.hpp"
#include "mmblock/sample.hpp"
#include "mmblock/scene.hpp"

namespace mmblock {

/// A recorded (or simulated) scenario directory:
///
///   rssi.csv     t,p0,...,p{M-1}        one row per step, consecutive t
///   lidar.csv    t,angle,depth          one row per point; steps without points absent
///   truth.csv    t,x,y,blocked          optional; x,y transmitter-local, "nan" if no object
///   scenario.cfg                        optional; resolved simulator config
///
/// Writers need exclusive access to the directory; readers may run concurrently.
struct ScenarioBundle {
  std::string name;
  std::vector<RssiFrame> rssi;
  std::vector<LidarScan> lidar;  // one per rssi frame, same t
  std::vector<Centroid> truth;   // empty when truth.csv is absent
  std::vector<BlockageLabel> labels;
  std::optional<ScenarioConfig> config;
  std::size_t rssi_rows = 0;
  std::size_t lidar_rows = 0;
  std::size_t truth_rows = 0;

  bool has_truth() const { return !truth.empty(); }
  int num_beams() const { return rssi.empty() ? 0 : static_cast<int>(rssi.front().powers.size()); }
};

void save_scenario(const std::filesystem::path& dir, const SimulationResult& sim,
                   const ScenarioConfig& config);

ScenarioBundle load_scenario(const std::filesystem::path& dir);

/// In-memory equivalent of save_scenario followed by load_scenario.
ScenarioBundle make_bundle(std::string name, const SimulationResult& sim,
                           const ScenarioConfig& config);

/// Dataset directory: dataset.json (format version, metadata, counts) + samples.csv.
/// Floating-point values are written in shortest round-trip form, so loading a saved
/// dataset reproduces every value bit for bit.
void save_dataset(const DatasetFile& d, const std::filesystem::path& dir);
DatasetFile load_dataset(const std::filesystem::path& dir);

constexpr int kDatasetFormatVersion = 1;

/// Contiguous time-block split inside each scenario: the earliest samples go to
/// train, then validation, then test. Counts are floor(ratio * n) for train and
/// validation with the remainder going to test. `seed` is accepted for interface
/// stability; the block split is fully determined by sample order.
DatasetFile split_dataset(std::vector<LabeledSample> samples, SplitRatios ratios,
                          std::uint64_t seed, DatasetMeta meta = {});

}  // namespace mmblock
