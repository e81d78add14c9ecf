#include "mmblock/geometry.hpp"

#include <cmath>

#include "mmblock/preprocess.hpp"

namespace mmblock {

namespace {
constexpr double kDegenerate = 1e-9;
}

void validate(const LinkGeometry& link) {
  if (link.tx == link.rx) throw Error(ErrorKind::degenerate_link, "tx and rx coincide");
  if (!(link.object_width > 0.0))
    throw Error(ErrorKind::invalid_argument, "object_width must be positive");
  if (!(link.r0 > 0.0)) throw Error(ErrorKind::invalid_argument, "r0 must be positive");
}

bool blockage_from_location(const Centroid& loc, const LinkGeometry& link) {
  if (!loc.valid) throw Error(ErrorKind::invalid_argument, "location is not valid");
  validate(link);
  double along_t = link.tx.y, along_r = link.rx.y, along_obj = loc.y;
  double across_t = link.tx.x, across_r = link.rx.x, across_obj = loc.x;
  if (std::abs(link.rx.y - link.tx.y) < kDegenerate) {
    std::swap(along_t, across_t);
    std::swap(along_r, across_r);
    std::swap(along_obj, across_obj);
  }
  const double v = (along_obj - along_t) / (along_r - along_t);
  if (v < 0.0 || v > 1.0) return false;
  const double across_los = across_t + v * (across_r - across_t);
  const double u = 0.5 + (across_los - across_obj) / link.object_width;
  return u >= 0.0 && u <= 1.0;
}

std::vector<BlockageLabel> blockage_labels_from_rssi(std::span<const RssiFrame> frames, double r0) {
  if (!(r0 > 0.0)) throw Error(ErrorKind::invalid_argument, "r0 must be positive");
  std::vector<BlockageLabel> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back({f.t, total_power(f) < r0});
  return out;
}

std::vector<bool> predict_blockage_sequence(const RfLocalizationModel& model,
                                            std::span<const RssiFrame> window,
                                            const LinkGeometry& link) {
  validate(link);
  const Rect road{model.road_origin.x, model.road_origin.y, model.road_origin.x + model.extent_x,
                  model.road_origin.y + model.extent_y};
  std::vector<bool> out;
  for (const auto& c : predict_locations(model, window)) {
    if (!c.valid) {
      out.push_back(false);
      continue;
    }
    const Vec2 p = from_road_frame({c.x, c.y}, road);
    out.push_back(blockage_from_location({c.t, p.x, p.y, true}, link));
  }
  return out;
}

std::vector<bool> occlusion_sequence(const WorldState& world, const LinkGeometry& link, long t,
                                     long horizon) {
  std::vector<bool> out;
  for (long h = 1; h <= horizon; ++h) out.push_back(los_occluded(world, link.tx, link.rx, t + h));
  return out;
}

LinkGeometry transfer_link(const LinkGeometry& link, Vec2 new_rx) {
  LinkGeometry out = link;
  out.rx = new_rx;
  validate(out);
  return out;
}

}  // namespace mmblock
