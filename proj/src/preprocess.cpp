#include "mmblock/preprocess.hpp"

#include <cmath>
#include <algorithm>
#include <deque>
#include <limits>

#include "mmblock/kernels.hpp"

namespace mmblock {

void validate(const SrcConfig& cfg) {
  if (!(cfg.proximity_radius >= 0.0))
    throw Error(ErrorKind::invalid_argument, "proximity_radius must be >= 0");
  if (!(cfg.road_region.width() > 0.0) || !(cfg.road_region.height() > 0.0))
    throw Error(ErrorKind::invalid_argument, "road_region must have positive area");
}

void validate(const DbscanConfig& cfg) {
  if (!(cfg.eps > 0.0)) throw Error(ErrorKind::invalid_argument, "eps must be > 0");
  if (cfg.min_pts < 1) throw Error(ErrorKind::invalid_argument, "min_pts must be >= 1");
}

FilteredScan src_filter(const LidarScan& scan, const SrcConfig& cfg) {
  FilteredScan out{scan.t, {}};
  for (const auto& p : scan.points) {
    if (p.depth < cfg.proximity_radius) continue;
    const Vec2 q{p.depth * std::cos(p.angle), p.depth * std::sin(p.angle)};
    if (!cfg.road_region.contains(q)) continue;
    out.points.push_back(q);
  }
  return out;
}

namespace {

constexpr int kUnvisited = -2;
constexpr int kNoise = -1;

DbscanResult expand(const std::vector<std::vector<std::uint32_t>>& nbrs, std::size_t min_pts) {
  const std::size_t n = nbrs.size();
  std::vector<int> label(n, kUnvisited);
  DbscanResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    if (nbrs[i].size() < min_pts) {
      label[i] = kNoise;
      continue;
    }
    const int id = static_cast<int>(out.clusters.size());
    out.clusters.emplace_back();
    label[i] = id;
    std::deque<std::size_t> frontier(nbrs[i].begin(), nbrs[i].end());
    while (!frontier.empty()) {
      const std::size_t j = frontier.front();
      frontier.pop_front();
      if (label[j] == kNoise) label[j] = id;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = id;
      if (nbrs[j].size() >= min_pts) frontier.insert(frontier.end(), nbrs[j].begin(), nbrs[j].end());
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0)
      out.clusters[static_cast<std::size_t>(label[i])].push_back(i);
    else
      out.noise.push_back(i);
  }
  return out;
}

}  // namespace

DbscanResult dbscan(std::span<const Vec2> points, const DbscanConfig& cfg) {
  validate(cfg);
  return expand(kernels::neighbor_lists(points, cfg.eps), cfg.min_pts);
}

DbscanResult dbscan_serial(std::span<const Vec2> points, const DbscanConfig& cfg) {
  validate(cfg);
  return expand(kernels::neighbor_lists_serial(points, cfg.eps), cfg.min_pts);
}

Vec2 to_road_frame(Vec2 p, const Rect& road) { return {p.x - road.xmin, p.y - road.ymin}; }
Vec2 from_road_frame(Vec2 p, const Rect& road) { return {p.x + road.xmin, p.y + road.ymin}; }

Centroid extract_centroid(const LidarScan& scan, const SrcConfig& src, const DbscanConfig& db) {
  validate(src);
  const auto filtered = src_filter(scan, src);
  const auto result = dbscan(filtered.points, db);
  Centroid c{scan.t, 0.0, 0.0, false};
  if (result.clusters.empty()) return c;

  const Vec2 center = src.road_region.center();
  auto mean_distance = [&](const std::vector<std::size_t>& members) {
    double sum = 0.0;
    for (auto i : members) sum += norm(filtered.points[i] - center);
    return sum / static_cast<double>(members.size());
  };
  std::size_t best = 0;
  double best_dist = mean_distance(result.clusters[0]);
  for (std::size_t k = 1; k < result.clusters.size(); ++k) {
    const auto size = result.clusters[k].size();
    const auto best_size = result.clusters[best].size();
    if (size < best_size) continue;
    const double d = mean_distance(result.clusters[k]);
    if (size > best_size || d < best_dist) {
      best = k;
      best_dist = d;
    }
  }
  Vec2 sum;
  for (auto i : result.clusters[best]) sum = sum + filtered.points[i];
  const Vec2 mean = (1.0 / static_cast<double>(result.clusters[best].size())) * sum;
  const Vec2 road = to_road_frame(mean, src.road_region);
  return {scan.t, road.x, road.y, true};
}

std::vector<double> rasterize_scan(const LidarScan& scan, int bins, double max_range) {
  if (bins < 1) throw Error(ErrorKind::invalid_argument, "lidar_bins must be >= 1");
  std::vector<double> depth(static_cast<std::size_t>(bins), max_range);
  for (const auto& p : scan.points) {
    auto k = static_cast<long>(std::floor(p.angle / kTwoPi * bins));
    k = std::clamp(k, 0L, static_cast<long>(bins) - 1);
    auto& d = depth[static_cast<std::size_t>(k)];
    d = std::min(d, std::min(p.depth, max_range));
  }
  return depth;
}

std::vector<LabeledSample> build_windows(const ScenarioBundle& bundle,
                                         std::span<const Centroid> centroids,
                                         const WindowConfig& cfg) {
  if (cfg.t0 < 1 || cfg.horizon < 1)
    throw Error(ErrorKind::invalid_argument, "T0 and N must be >= 1");
  const auto n = static_cast<long>(bundle.rssi.size());
  if (static_cast<long>(centroids.size()) != n || static_cast<long>(bundle.lidar.size()) != n)
    throw Error(ErrorKind::length_mismatch, "centroids must align with the bundle's frames");

  std::vector<LabeledSample> out;
  for (long i = cfg.t0 - 1; i + cfg.horizon < n; ++i) {
    bool ok = true;
    for (long h = 0; h <= cfg.horizon && ok; ++h) ok = centroids[static_cast<std::size_t>(i + h)].valid;
    if (!ok) continue;
    LabeledSample s;
    s.scenario = bundle.name;
    s.t = bundle.rssi[static_cast<std::size_t>(i)].t;
    s.window.assign(bundle.rssi.begin() + (i - cfg.t0 + 1), bundle.rssi.begin() + i + 1);
    s.label = centroids[static_cast<std::size_t>(i)];
    for (long h = 1; h <= cfg.horizon; ++h) {
      const auto k = static_cast<std::size_t>(i + h);
      s.future.push_back(centroids[k]);
      s.future_blocked.push_back(total_power(bundle.rssi[k]) < cfg.r0 ? 1 : 0);
    }
    s.lidar_depth = rasterize_scan(bundle.lidar[static_cast<std::size_t>(i)], cfg.lidar_bins,
                                   cfg.lidar_max_range);
    out.push_back(std::move(s));
  }
  return out;
}

DatasetFile label_scenarios(std::span<const ScenarioBundle> bundles, const LabelConfig& cfg) {
  validate(cfg.src);
  validate(cfg.dbscan);
  if (bundles.empty()) throw Error(ErrorKind::invalid_argument, "no scenarios to label");
  WindowConfig window = cfg.window;
  if (!(window.r0 > 0.0)) {
    std::vector<RssiFrame> frames;
    std::vector<BlockageLabel> labels;
    for (const auto& b : bundles) {
      if (!b.has_truth()) continue;
      frames.insert(frames.end(), b.rssi.begin(), b.rssi.end());
      labels.insert(labels.end(), b.labels.begin(), b.labels.end());
    }
    if (frames.empty())
      throw Error(ErrorKind::invalid_argument, "r0 not given and no scenario carries truth to calibrate it");
    window.r0 = calibrate_threshold(frames, labels);
  }

  DatasetMeta meta;
  meta.t0 = window.t0;
  meta.horizon = window.horizon;
  meta.num_beams = bundles.front().num_beams();
  meta.lidar_bins = window.lidar_bins;
  meta.lidar_max_range = window.lidar_max_range;
  meta.r0 = window.r0;
  meta.eps = cfg.dbscan.eps;
  meta.min_pts = static_cast<long>(cfg.dbscan.min_pts);
  meta.proximity_radius = cfg.src.proximity_radius;
  meta.road_region = cfg.src.road_region;
  for (const auto& b : bundles) {
    if (b.config) {
      meta.tx = b.config->world.tx_pos;
      meta.rx = b.config->world.rx_pos;
      break;
    }
  }

  std::vector<LabeledSample> samples;
  for (const auto& b : bundles) {
    if (b.num_beams() != meta.num_beams)
      throw Error(ErrorKind::shape_mismatch, "scenario " + b.name + " has a different beam count");
    std::vector<Centroid> centroids(b.lidar.size());
    kernels::parallel_for(centroids.size(), [&](std::size_t i) {
      centroids[i] = extract_centroid(b.lidar[i], cfg.src, cfg.dbscan);
    });
    auto w = build_windows(b, centroids, window);
    samples.insert(samples.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
    meta.scenarios.push_back(b.name);
  }
  return split_dataset(std::move(samples), cfg.ratios, cfg.seed, std::move(meta));
}

}  // namespace mmblock
