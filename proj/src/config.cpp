#include "mmblock/config.hpp"

#include <algorithm>
#include <type_traits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mmblock/text.hpp"

namespace mmblock {

namespace pt = boost::property_tree;

namespace {

KeyValues flatten(const pt::ptree& tree) {
  KeyValues kv;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      kv[section] = body.data();
      continue;
    }
    for (const auto& [key, value] : body) kv[section + "." + key] = value.data();
  }
  return kv;
}

template <class T>
void maybe(const KeyValues& kv, const std::string& key, T& out) {
  const auto it = kv.find(key);
  if (it == kv.end()) return;
  if constexpr (std::is_same_v<T, double>) {
    out = text::to_double(it->second, key);
  } else if constexpr (std::is_same_v<T, Vec2>) {
    out = text::to_vec2(it->second, key);
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    out = text::to_doubles(it->second, key);
  } else {
    out = static_cast<T>(text::to_long(it->second, key));
  }
}

/// Indices N of sections named `<prefix>N`, ascending.
std::vector<long> numbered_sections(const KeyValues& kv, const std::string& prefix) {
  std::vector<long> ids;
  for (const auto& [key, value] : kv) {
    if (key.rfind(prefix, 0) != 0) continue;
    const auto dot = key.find('.');
    long id = 0;
    if (dot == std::string::npos ||
        !text::parse_long(std::string_view(key).substr(prefix.size(), dot - prefix.size()), id))
      continue;
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string vec(Vec2 v) { return text::format_double(v.x) + " " + text::format_double(v.y); }

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::parse_error, std::string("config line ") + std::to_string(e.line()) +
                                            ": " + e.message());
  }
  return flatten(tree);
}

KeyValues read_key_values(const std::filesystem::path& path) {
  return parse_key_values(text::read_file(path.string()));
}

ScenarioConfig scenario_from(const KeyValues& kv, std::optional<std::uint64_t> seed) {
  ScenarioConfig cfg;
  maybe(kv, "scenario.steps", cfg.steps);
  long s = static_cast<long>(cfg.seed);
  maybe(kv, "scenario.seed", s);
  cfg.seed = seed ? *seed : static_cast<std::uint64_t>(s);

  auto& w = cfg.world;
  maybe(kv, "world.tx", w.tx_pos);
  maybe(kv, "world.rx", w.rx_pos);
  maybe(kv, "world.lidar_max_range", w.lidar_max_range);
  maybe(kv, "world.lidar_rays", w.lidar_rays);

  maybe(kv, "codebook.num_beams", cfg.num_beams);
  maybe(kv, "codebook.theta_offset", cfg.theta_offset);
  maybe(kv, "codebook.fov", cfg.fov);

  auto& c = cfg.channel;
  maybe(kv, "channel.num_subcarriers", c.num_subcarriers);
  maybe(kv, "channel.noise_variance", c.noise_variance);
  maybe(kv, "channel.blocked_attenuation_db", c.blocked_attenuation_db);
  maybe(kv, "channel.scatter_coefficient", c.scatter_coefficient);
  maybe(kv, "channel.sidelobe_floor_db", c.sidelobe_floor_db);

  const bool has_traffic = std::any_of(kv.begin(), kv.end(), [](const auto& e) {
    return e.first.rfind("traffic.", 0) == 0;
  });
  if (has_traffic) {
    TrafficConfig t;
    maybe(kv, "traffic.vehicles", t.vehicles);
    maybe(kv, "traffic.speed_min", t.speed_min);
    maybe(kv, "traffic.speed_max", t.speed_max);
    maybe(kv, "traffic.spacing_min", t.spacing_min);
    maybe(kv, "traffic.spacing_max", t.spacing_max);
    maybe(kv, "traffic.lanes", t.lanes);
    maybe(kv, "traffic.width_min", t.width_min);
    maybe(kv, "traffic.width_max", t.width_max);
    maybe(kv, "traffic.depth", t.depth);
    maybe(kv, "traffic.start_x", t.start_x);
    cfg.traffic = t;
  }

  for (long id : numbered_sections(kv, "vehicle")) {
    const std::string p = "vehicle" + std::to_string(id) + ".";
    Vehicle v;
    maybe(kv, p + "center", v.center);
    maybe(kv, p + "width", v.width);
    maybe(kv, p + "depth", v.depth);
    maybe(kv, p + "velocity", v.velocity);
    w.vehicles.push_back(v);
  }
  for (long id : numbered_sections(kv, "obstacle")) {
    const std::string p = "obstacle" + std::to_string(id) + ".";
    Segment seg;
    maybe(kv, p + "a", seg.a);
    maybe(kv, p + "b", seg.b);
    w.static_obstacles.push_back(seg);
  }
  cfg.codebook();  // validates
  validate(cfg.channel);
  validate(w);
  return cfg;
}

ScenarioConfig resolve(const ScenarioConfig& cfg) {
  ScenarioConfig out = cfg;
  if (cfg.traffic) {
    auto generated = generate_traffic(*cfg.traffic, cfg.seed);
    generated.insert(generated.end(), cfg.world.vehicles.begin(), cfg.world.vehicles.end());
    out.world.vehicles = std::move(generated);
    out.traffic.reset();
  }
  if (out.steps <= 0) out.steps = steps_to_clear(out.world.vehicles, out.world.tx_pos.x + 20.0);
  return out;
}

std::string to_ini(const ScenarioConfig& in) {
  const ScenarioConfig cfg = resolve(in);
  std::ostringstream o;
  const auto f = [](double v) { return text::format_double(v); };
  o << "[scenario]\nsteps = " << cfg.steps << "\nseed = " << cfg.seed << "\n\n";
  o << "[world]\ntx = " << vec(cfg.world.tx_pos) << "\nrx = " << vec(cfg.world.rx_pos)
    << "\nlidar_max_range = " << f(cfg.world.lidar_max_range)
    << "\nlidar_rays = " << cfg.world.lidar_rays << "\n\n";
  o << "[codebook]\nnum_beams = " << cfg.num_beams << "\ntheta_offset = " << f(cfg.theta_offset)
    << "\nfov = " << f(cfg.fov) << "\n\n";
  const auto& c = cfg.channel;
  o << "[channel]\nnum_subcarriers = " << c.num_subcarriers
    << "\nnoise_variance = " << f(c.noise_variance)
    << "\nblocked_attenuation_db = " << f(c.blocked_attenuation_db)
    << "\nscatter_coefficient = " << f(c.scatter_coefficient)
    << "\nsidelobe_floor_db = " << f(c.sidelobe_floor_db) << "\n";
  for (std::size_t i = 0; i < cfg.world.vehicles.size(); ++i) {
    const auto& v = cfg.world.vehicles[i];
    o << "\n[vehicle" << i << "]\ncenter = " << vec(v.center) << "\nwidth = " << f(v.width)
      << "\ndepth = " << f(v.depth) << "\nvelocity = " << vec(v.velocity) << "\n";
  }
  for (std::size_t i = 0; i < cfg.world.static_obstacles.size(); ++i) {
    const auto& s = cfg.world.static_obstacles[i];
    o << "\n[obstacle" << i << "]\na = " << vec(s.a) << "\nb = " << vec(s.b) << "\n";
  }
  return o.str();
}

ScenarioConfig standard_scenario(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.world.tx_pos = {0.0, 0.0};
  cfg.world.rx_pos = {0.0, 10.0};
  cfg.world.static_obstacles = {
      {{-20.0, 12.0}, {20.0, 12.0}},  // wall across the road
      {{-6.0, -3.0}, {6.0, -3.0}},    // building behind the transmitter
      {{0.3, -0.4}, {0.6, -0.4}},     // mast clutter next to the sensor
  };
  cfg.traffic = TrafficConfig{};
  return cfg;
}

}  // namespace mmblock
