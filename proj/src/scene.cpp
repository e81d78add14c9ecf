#include "mmblock/scene.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "mmblock/kernels.hpp"

namespace mmblock {

namespace {

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

bool segment_hits_rect(Vec2 from, Vec2 to, const Rect& r) {
  const Vec2 p = to - from;
  double t0 = 0.0;
  double t1 = 1.0;
  const double ps[4] = {-p.x, p.x, -p.y, p.y};
  const double qs[4] = {from.x - r.xmin, r.xmax - from.x, from.y - r.ymin, r.ymax - from.y};
  for (int i = 0; i < 4; ++i) {
    if (ps[i] == 0.0) {
      if (qs[i] < 0.0) return false;
      continue;
    }
    const double ratio = qs[i] / ps[i];
    if (ps[i] < 0.0)
      t0 = std::max(t0, ratio);
    else
      t1 = std::min(t1, ratio);
    if (t0 > t1) return false;
  }
  return true;
}

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

double BeamCodebook::gain(int m, double angle, double sidelobe_floor) const {
  const double bw = beamwidth();
  const double d = std::abs(wrap_angle(angle - steering_dirs[static_cast<std::size_t>(m)]));
  if (d >= bw) return sidelobe_floor;
  const double c = std::cos(kPi * d / (2.0 * bw));
  return std::max(c * c, sidelobe_floor);
}

BeamCodebook build_codebook(int num_beams, double theta_offset, double fov) {
  if (num_beams < 1) throw Error(ErrorKind::invalid_argument, "codebook needs at least one beam");
  if (!(fov > 0.0) || fov > kTwoPi)
    throw Error(ErrorKind::invalid_argument, "codebook fov must lie in (0, 2pi]");
  BeamCodebook cb;
  cb.num_beams = num_beams;
  cb.theta_offset = theta_offset;
  cb.fov = fov;
  cb.steering_dirs.resize(static_cast<std::size_t>(num_beams));
  for (int m = 0; m < num_beams; ++m)
    cb.steering_dirs[static_cast<std::size_t>(m)] =
        theta_offset + (m + 0.5) * fov / static_cast<double>(num_beams);
  return cb;
}

Rect Vehicle::footprint_at(long t) const {
  const Vec2 c = center_at(t);
  return {c.x - 0.5 * width, c.y - 0.5 * depth, c.x + 0.5 * width, c.y + 0.5 * depth};
}

void validate(const WorldState& world) {
  if (world.tx_pos == world.rx_pos)
    throw Error(ErrorKind::invalid_argument, "tx and rx positions coincide");
  for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
    const auto& v = world.vehicles[i];
    if (!(v.width > 0.0) || !(v.depth > 0.0))
      throw Error(ErrorKind::invalid_argument,
                  "vehicle " + std::to_string(i) + " needs positive width and depth");
  }
  if (!(world.lidar_max_range > 0.0))
    throw Error(ErrorKind::invalid_argument, "lidar_max_range must be positive");
  if (world.lidar_rays < 1) throw Error(ErrorKind::invalid_argument, "lidar_rays must be >= 1");
}

void validate(const ChannelConfig& channel) {
  if (channel.num_subcarriers < 1)
    throw Error(ErrorKind::invalid_argument, "num_subcarriers must be >= 1");
  if (!(channel.noise_variance >= 0.0))
    throw Error(ErrorKind::invalid_argument, "noise_variance must be >= 0");
  if (!(channel.blocked_attenuation_db > 0.0))
    throw Error(ErrorKind::invalid_argument, "blocked_attenuation_db must be > 0");
  if (!(channel.scatter_coefficient >= 0.0))
    throw Error(ErrorKind::invalid_argument, "scatter_coefficient must be >= 0");
}

std::vector<Segment> scene_segments(const WorldState& world, long t) {
  std::vector<Segment> segs;
  segs.reserve(world.vehicles.size() * 4 + world.static_obstacles.size());
  for (const auto& v : world.vehicles) {
    const Rect r = v.footprint_at(t);
    const Vec2 a{r.xmin, r.ymin}, b{r.xmax, r.ymin}, c{r.xmax, r.ymax}, d{r.xmin, r.ymax};
    segs.push_back({a, b});
    segs.push_back({b, c});
    segs.push_back({c, d});
    segs.push_back({d, a});
  }
  segs.insert(segs.end(), world.static_obstacles.begin(), world.static_obstacles.end());
  return segs;
}

bool los_occluded(const WorldState& world, Vec2 from, Vec2 to, long t) {
  for (const auto& v : world.vehicles)
    if (segment_hits_rect(from, to, v.footprint_at(t))) return true;
  for (const auto& s : world.static_obstacles)
    if (segments_intersect(from, to, s.a, s.b)) return true;
  return false;
}

std::vector<double> beam_powers(const WorldState& world, const BeamCodebook& codebook,
                                const ChannelConfig& channel, long t) {
  const double floor = db_to_linear(channel.sidelobe_floor_db);
  const Vec2 los = world.rx_pos - world.tx_pos;
  const double los_angle = std::atan2(los.y, los.x);
  const double los_len = norm(los);
  const double los_power = los_occluded(world, world.tx_pos, world.rx_pos, t)
                               ? db_to_linear(-channel.blocked_attenuation_db)
                               : 1.0;

  struct Path {
    double angle;
    double power;
  };
  std::vector<Path> scatter;
  if (channel.scatter_coefficient > 0.0) {
    for (const auto& v : world.vehicles) {
      const Vec2 c = v.center_at(t);
      const double d1 = norm(c - world.tx_pos);
      const double d2 = norm(world.rx_pos - c);
      if (d1 == 0.0) continue;
      const double amp = channel.scatter_coefficient * los_len / (d1 + d2);
      const Vec2 dir = c - world.tx_pos;
      scatter.push_back({std::atan2(dir.y, dir.x), amp * amp});
    }
  }

  std::vector<double> powers(static_cast<std::size_t>(codebook.num_beams));
  for (int m = 0; m < codebook.num_beams; ++m) {
    double p = codebook.gain(m, los_angle, floor) * los_power;
    for (const auto& path : scatter) p += codebook.gain(m, path.angle, floor) * path.power;
    powers[static_cast<std::size_t>(m)] = p * channel.symbol_power;
  }
  return powers;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

RssiFrame synthesize_frame(const WorldState& world, const BeamCodebook& codebook,
                           const ChannelConfig& channel, long t, std::uint64_t seed) {
  const auto expected = beam_powers(world, codebook, channel, t);
  RssiFrame frame{t, std::vector<double>(expected.size(), 0.0)};
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
  std::uniform_int_distribution<int> symbol(0, 3);
  std::normal_distribution<double> noise(0.0, std::sqrt(0.5 * channel.noise_variance));
  static const std::complex<double> kQpsk[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  for (std::size_t m = 0; m < expected.size(); ++m) {
    // Flat channel: the effective gain h^T f_m is the same on every subcarrier.
    const double amplitude = std::sqrt(expected[m] / channel.symbol_power);
    double sum = 0.0;
    for (int k = 0; k < channel.num_subcarriers; ++k) {
      std::complex<double> r = amplitude * std::sqrt(channel.symbol_power) * kQpsk[symbol(rng)];
      if (channel.noise_variance > 0.0) r += std::complex<double>(noise(rng), noise(rng));
      sum += std::norm(r);
    }
    frame.powers[m] = sum;
  }
  return frame;
}

}  // namespace

SimulationResult simulate_scenario(const WorldState& world, const BeamCodebook& codebook,
                                   const ChannelConfig& channel, long steps, std::uint64_t seed) {
  if (steps < 1) throw Error(ErrorKind::invalid_argument, "steps must be >= 1");
  validate(world);
  validate(channel);
  const auto n = static_cast<std::size_t>(steps);
  SimulationResult out;
  out.rssi.resize(n);
  out.lidar.resize(n);
  out.truth.resize(n);
  out.labels.resize(n);

  kernels::parallel_for(n, [&](std::size_t i) {
    const long t = static_cast<long>(i);
    out.rssi[i] = synthesize_frame(world, codebook, channel, t, seed);

    const auto segs = scene_segments(world, t);
    out.lidar[i] = {t, kernels::raycast_serial(world.tx_pos, segs, world.lidar_rays,
                                               world.lidar_max_range)};

    Centroid truth{t, 0.0, 0.0, false};
    double best = 0.0;
    for (const auto& v : world.vehicles) {
      const Vec2 c = v.center_at(t) - world.tx_pos;
      const double d = norm(c);
      if (!truth.valid || d < best) {
        truth = {t, c.x, c.y, true};
        best = d;
      }
    }
    out.truth[i] = truth;
    out.labels[i] = {t, los_occluded(world, world.tx_pos, world.rx_pos, t)};
  });
  return out;
}

double total_power(const RssiFrame& frame) {
  double sum = 0.0;
  for (double p : frame.powers) sum += p;
  return sum;
}

double calibrate_threshold(std::span<const RssiFrame> frames, std::span<const BlockageLabel> truth) {
  if (frames.size() != truth.size())
    throw Error(ErrorKind::length_mismatch, "frames and truth labels differ in length");
  double blocked_db = 0.0, clear_db = 0.0;
  std::size_t n_blocked = 0, n_clear = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const double db = 10.0 * std::log10(std::max(total_power(frames[i]), 1e-300));
    if (truth[i].blocked) {
      blocked_db += db;
      ++n_blocked;
    } else {
      clear_db += db;
      ++n_clear;
    }
  }
  if (n_blocked == 0 || n_clear == 0)
    throw Error(ErrorKind::invalid_argument,
                "threshold calibration needs both blocked and unblocked frames");
  const double mid = 0.5 * (blocked_db / n_blocked + clear_db / n_clear);
  return db_to_linear(mid);
}

std::vector<Vehicle> generate_traffic(const TrafficConfig& traffic, std::uint64_t seed) {
  if (traffic.vehicles < 0 || traffic.lanes.empty() || traffic.speed_min <= 0.0 ||
      traffic.speed_max < traffic.speed_min || traffic.spacing_max < traffic.spacing_min ||
      traffic.width_min <= 0.0 || traffic.width_max < traffic.width_min || traffic.depth <= 0.0)
    throw Error(ErrorKind::invalid_argument, "invalid traffic configuration");
  std::mt19937_64 rng(mix_seed(seed, 0x7261666669636ULL));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const double speed = draw(traffic.speed_min, traffic.speed_max);
  std::vector<Vehicle> out;
  double x = traffic.start_x;
  for (int k = 0; k < traffic.vehicles; ++k) {
    if (k > 0) x -= draw(traffic.spacing_min, traffic.spacing_max);
    const auto lane = static_cast<std::size_t>(unit(rng) * static_cast<double>(traffic.lanes.size()));
    Vehicle v;
    v.center = {x, traffic.lanes[std::min(lane, traffic.lanes.size() - 1)]};
    v.width = draw(traffic.width_min, traffic.width_max);
    v.depth = traffic.depth;
    v.velocity = {speed, 0.0};
    out.push_back(v);
  }
  return out;
}

long steps_to_clear(std::span<const Vehicle> vehicles, double clear_x) {
  long steps = 1;
  for (const auto& v : vehicles) {
    if (!(v.velocity.x > 0.0)) continue;
    const double dist = clear_x + 0.5 * v.width - v.center.x;
    steps = std::max(steps, static_cast<long>(std::ceil(dist / v.velocity.x)) + 1);
  }
  return steps;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::schema_mismatch: return "schema-mismatch";
    case ErrorKind::time_index_gap: return "time-index-gap";
    case ErrorKind::version_mismatch: return "version-mismatch";
    case ErrorKind::shape_mismatch: return "shape-mismatch";
    case ErrorKind::non_finite: return "non-finite-value";
    case ErrorKind::length_mismatch: return "length-mismatch";
    case ErrorKind::invalid_ratio: return "invalid-ratio";
    case ErrorKind::empty_split: return "empty-split";
    case ErrorKind::config_mismatch: return "config-mismatch";
    case ErrorKind::degenerate_link: return "degenerate-link";
    case ErrorKind::too_few_seeds: return "too-few-seeds";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::usage: return "usage";
  }
  return "error";
}

}  // namespace mmblock
