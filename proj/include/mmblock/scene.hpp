#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmblock/types.hpp"

namespace mmblock {

/// M steering directions evenly partitioning the field of view. Beam m points at
/// theta_offset + (m + 1/2) * fov / M.
struct BeamCodebook {
  int num_beams = 0;
  double theta_offset = 0.0;
  double fov = 0.0;
  std::vector<double> steering_dirs;

  /// Half-power beamwidth of every beam, fov / M.
  double beamwidth() const { return fov / num_beams; }

  /// Linear power gain of beam m toward `angle` (radians, any branch).
  /// Raised-cosine main lobe: cos^2(pi * d / (2 * bw)) for |d| < bw, where d is the
  /// wrapped angular distance to the steering direction and bw the beamwidth, so
  /// adjacent beams cross at half power. Outside the main lobe the gain is
  /// `sidelobe_floor`.
  double gain(int m, double angle, double sidelobe_floor) const;
};

BeamCodebook build_codebook(int num_beams, double theta_offset, double fov);

struct ChannelConfig {
  int num_subcarriers = 64;
  double noise_variance = 1e-4;
  double blocked_attenuation_db = 25.0;
  /// Amplitude of the single-bounce path via each vehicle, relative to the LoS path.
  /// Zero disables it and leaves a pure LoS channel.
  double scatter_coefficient = 0.3;
  double sidelobe_floor_db = -30.0;
  /// E[|s|^2]; fixed by the signal model.
  double symbol_power = 1.0;
};

struct RssiFrame {
  long t = 0;
  std::vector<double> powers;  // linear, one per beam

  friend bool operator==(const RssiFrame&, const RssiFrame&) = default;
};

struct LidarPoint {
  double angle = 0.0;  // [0, 2pi)
  double depth = 0.0;  // (0, max_range]

  friend bool operator==(const LidarPoint&, const LidarPoint&) = default;
};

struct LidarScan {
  long t = 0;
  std::vector<LidarPoint> points;

  friend bool operator==(const LidarScan&, const LidarScan&) = default;
};

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Axis-aligned box: `width` along x (direction of travel), `depth` along y.
struct Vehicle {
  Vec2 center;
  double width = 4.0;
  double depth = 1.9;
  Vec2 velocity;  // meters per step

  Vec2 center_at(long t) const { return center + static_cast<double>(t) * velocity; }
  Rect footprint_at(long t) const;
};

struct WorldState {
  Vec2 tx_pos;
  Vec2 rx_pos{0.0, 10.0};
  std::vector<Vehicle> vehicles;
  std::vector<Segment> static_obstacles;
  double lidar_max_range = 16.0;
  int lidar_rays = 360;  // rays per revolution, evenly spaced from angle 0
};

struct SimulationResult {
  std::vector<RssiFrame> rssi;
  std::vector<LidarScan> lidar;
  /// Transmitter-local center of the vehicle nearest the transmitter; invalid when
  /// the world has no vehicles.
  std::vector<Centroid> truth;
  /// Geometric LoS occlusion of the configured link.
  std::vector<BlockageLabel> labels;
};

void validate(const WorldState& world);
void validate(const ChannelConfig& channel);

/// All obstacle boundaries at step t: four edges per vehicle, then static segments.
std::vector<Segment> scene_segments(const WorldState& world, long t);

/// True when the closed segment from->to touches any vehicle footprint or static
/// obstacle at step t.
bool los_occluded(const WorldState& world, Vec2 from, Vec2 to, long t);

/// Per-beam linear received power (expected value per subcarrier, before noise) at step t.
std::vector<double> beam_powers(const WorldState& world, const BeamCodebook& codebook,
                                const ChannelConfig& channel, long t);

/// Deterministic for a given seed. Steps are independent and run in parallel.
SimulationResult simulate_scenario(const WorldState& world, const BeamCodebook& codebook,
                                   const ChannelConfig& channel, long steps, std::uint64_t seed);

/// Sum of per-beam powers, |r_t| in the blockage indicator.
double total_power(const RssiFrame& frame);

/// Threshold halfway (in dB) between the mean blocked and mean unblocked total power.
/// Throws invalid_argument unless both classes are present.
double calibrate_threshold(std::span<const RssiFrame> frames, std::span<const BlockageLabel> truth);

/// Randomized single-file traffic on a straight road parallel to the x axis.
struct TrafficConfig {
  int vehicles = 6;
  double speed_min = 0.8;
  double speed_max = 1.3;
  double spacing_min = 34.0;
  double spacing_max = 44.0;
  std::vector<double> lanes{4.5, 6.0};
  double width_min = 3.6;
  double width_max = 4.8;
  double depth = 1.9;
  double start_x = -20.0;
};

/// Vehicles for one scenario; all share one speed so spacing is preserved.
std::vector<Vehicle> generate_traffic(const TrafficConfig& traffic, std::uint64_t seed);

/// Steps needed for every generated vehicle to clear x = clear_x.
long steps_to_clear(std::span<const Vehicle> vehicles, double clear_x);

/// SplitMix64 finalizer; used to derive independent per-step streams from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mmblock
