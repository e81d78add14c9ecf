#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "mmblock/scene.hpp"

namespace mmblock {

/// Everything `simulate` needs. Read from an INI-style key/value file:
///
///   [scenario]  steps (0 = until all traffic clears x = +20 m), seed
///   [world]     tx = "x y", rx = "x y", lidar_max_range, lidar_rays
///   [codebook]  num_beams, theta_offset, fov            (radians)
///   [channel]   num_subcarriers, noise_variance, blocked_attenuation_db,
///               scatter_coefficient, sidelobe_floor_db
///   [traffic]   vehicles, speed_min, speed_max, spacing_min, spacing_max,
///               lanes = "y1 y2 ...", width_min, width_max, depth, start_x
///   [vehicleN]  center = "x y", width, depth, velocity = "vx vy"
///   [obstacleN] a = "x y", b = "x y"
///
/// Explicit [vehicleN] sections are appended after any generated traffic. Other
/// sections (label, train, ...) are carried through untouched for the CLI.
struct ScenarioConfig {
  WorldState world;
  int num_beams = 64;
  double theta_offset = kPi / 12.0;
  double fov = 5.0 * kPi / 6.0;
  ChannelConfig channel;
  std::optional<TrafficConfig> traffic;
  long steps = 0;
  std::uint64_t seed = 1;

  BeamCodebook codebook() const { return build_codebook(num_beams, theta_offset, fov); }
};

/// Flat "section.key" -> value view of an INI file.
using KeyValues = std::map<std::string, std::string>;

KeyValues read_key_values(const std::filesystem::path& path);
KeyValues parse_key_values(const std::string& text);

/// Builds the scenario; `seed` overrides [scenario] seed when given.
ScenarioConfig scenario_from(const KeyValues& kv, std::optional<std::uint64_t> seed = std::nullopt);

/// Fully resolved scenario (generated traffic expanded into explicit vehicles) in the
/// same INI format, so reading it back reproduces the world exactly.
std::string to_ini(const ScenarioConfig& cfg);

/// The built-in standard scenario: transmitter at the origin, receiver 10 m up the y
/// axis, a two-lane road crossing the link, a wall behind the road and clutter near
/// the transmitter.
ScenarioConfig standard_scenario(std::uint64_t seed);

/// Resolves generated traffic and automatic step count into the world.
ScenarioConfig resolve(const ScenarioConfig& cfg);

}  // namespace mmblock
