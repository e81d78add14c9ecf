#pragma once

#include <string>
#include <vector>

#include "mmblock/config.hpp"
#include "mmblock/ingest.hpp"
#include "mmblock/preprocess.hpp"

namespace fixture {

/// Standard scenarios with seeds 1..count, simulated and loaded in memory.
inline std::vector<mmblock::ScenarioBundle> standard_bundles(int count) {
  std::vector<mmblock::ScenarioBundle> out;
  for (int s = 1; s <= count; ++s) {
    const auto cfg = mmblock::resolve(mmblock::standard_scenario(static_cast<std::uint64_t>(s)));
    const auto sim = mmblock::simulate_scenario(cfg.world, cfg.codebook(), cfg.channel, cfg.steps, cfg.seed);
    out.push_back(mmblock::make_bundle("standard" + std::to_string(s), sim, cfg));
  }
  return out;
}

inline const std::vector<mmblock::ScenarioBundle>& cached_bundles() {
  static const auto b = standard_bundles(6);
  return b;
}

/// Labeled dataset over the six standard scenarios with default labeling settings.
inline const mmblock::DatasetFile& standard_dataset() {
  static const auto d = mmblock::label_scenarios(cached_bundles(), mmblock::LabelConfig{});
  return d;
}

}  // namespace fixture
