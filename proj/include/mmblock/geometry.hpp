#pragma once

#include <span>
#include <vector>

#include "mmblock/models.hpp"
#include "mmblock/scene.hpp"
#include "mmblock/types.hpp"

namespace mmblock {

/// A transmitter-receiver pair plus what the geometric blockage test needs.
/// Coordinates are transmitter-local meters.
struct LinkGeometry {
  Vec2 tx;
  Vec2 rx{0.0, 10.0};
  double object_width = 4.0;  // omega
  double r0 = 1.0;            // linear total-power threshold

  friend bool operator==(const LinkGeometry&, const LinkGeometry&) = default;
};

void validate(const LinkGeometry& link);

/// True when the LoS segment passes through the omega-wide object extent centered
/// at `loc`. With v the position of loc.y along Tx->Rx and x_los the LoS abscissa
/// there, u = 1/2 + (x_los - loc.x) / omega; blocked iff v and u both lie in [0, 1].
/// Links with y_T == y_R swap the roles of x and y.
bool blockage_from_location(const Centroid& loc, const LinkGeometry& link);

/// blocked iff total_power(frame) < r0.
std::vector<BlockageLabel> blockage_labels_from_rssi(std::span<const RssiFrame> frames, double r0);

/// Predicted locations (road frame) mapped through the geometric test. Invalid
/// locations count as unblocked.
std::vector<bool> predict_blockage_sequence(const RfLocalizationModel& model,
                                            std::span<const RssiFrame> window,
                                            const LinkGeometry& link);

/// Geometric truth for steps t+1..t+horizon: whether the link's LoS segment touches
/// any obstacle of `world`. Used to score a moved receiver without new recordings.
std::vector<bool> occlusion_sequence(const WorldState& world, const LinkGeometry& link, long t,
                                     long horizon);

/// Same link with the receiver moved. The model is not involved.
LinkGeometry transfer_link(const LinkGeometry& link, Vec2 new_rx);

}  // namespace mmblock
