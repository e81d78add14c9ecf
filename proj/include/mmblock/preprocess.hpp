#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmblock/ingest.hpp"
#include "mmblock/sample.hpp"
#include "mmblock/scene.hpp"

namespace mmblock {

/// Static clutter removal. Both fields are in the transmitter-local frame.
struct SrcConfig {
  double proximity_radius = 1.0;
  Rect road_region{-16.0, 2.5, 16.0, 8.0};
};

struct DbscanConfig {
  double eps = 2.0;
  std::size_t min_pts = 4;
};

void validate(const SrcConfig& cfg);
void validate(const DbscanConfig& cfg);

struct FilteredScan {
  long t = 0;
  std::vector<Vec2> points;  // transmitter-local Cartesian
};

/// Drops points within proximity_radius of the sensor and points outside the road
/// region. Surviving points keep their scan order.
FilteredScan src_filter(const LidarScan& scan, const SrcConfig& cfg);

struct DbscanResult {
  std::vector<std::vector<std::size_t>> clusters;  // ascending indices, in discovery order
  std::vector<std::size_t> noise;
};

/// Density-based clustering. A point is core when at least min_pts points (itself
/// included) lie within eps. Points are visited in ascending index order; a border
/// point joins the first cluster whose expansion reaches it.
DbscanResult dbscan(std::span<const Vec2> points, const DbscanConfig& cfg);

/// Same result, neighbor search on one thread.
DbscanResult dbscan_serial(std::span<const Vec2> points, const DbscanConfig& cfg);

/// Location label for one scan, in the road frame. Picks the largest cluster; ties go
/// to the cluster whose points are closest on average to the road-region center.
Centroid extract_centroid(const LidarScan& scan, const SrcConfig& src, const DbscanConfig& db);

/// Converts a transmitter-local point into the road frame and back.
Vec2 to_road_frame(Vec2 p, const Rect& road_region);
Vec2 from_road_frame(Vec2 p, const Rect& road_region);

struct WindowConfig {
  long t0 = 8;
  long horizon = 5;
  double r0 = 0.0;  // blockage threshold for future_blocked
  int lidar_bins = 360;
  double lidar_max_range = 16.0;
};

/// Per-bin minimum depth; bins without a return read lidar_max_range.
std::vector<double> rasterize_scan(const LidarScan& scan, int bins, double max_range);

/// One sample per t with frames t-T0+1..t present and centroids t..t+N all valid.
/// Stride 1; windows never leave the bundle.
std::vector<LabeledSample> build_windows(const ScenarioBundle& bundle,
                                         std::span<const Centroid> centroids,
                                         const WindowConfig& cfg);

struct LabelConfig {
  SrcConfig src;
  DbscanConfig dbscan;
  WindowConfig window;  // window.r0 <= 0 means calibrate from simulator truth
  SplitRatios ratios;
  std::uint64_t seed = 0;
};

/// Full labeling stage: per-scan centroids, windows and the block split. The link
/// recorded in the metadata comes from the first bundle carrying a scenario config.
DatasetFile label_scenarios(std::span<const ScenarioBundle> bundles, const LabelConfig& cfg);

}  // namespace mmblock
