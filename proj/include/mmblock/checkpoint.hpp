#pragma once

#include <filesystem>
#include <string>

#include "mmblock/models.hpp"

namespace mmblock {

/// JSON checkpoint: format version, model kind, architecture sizes, input and output
/// normalization, then every parameter array flattened in parameters() order.
/// Doubles are written in shortest round-trip form, so loading is bit-exact.
constexpr int kCheckpointFormatVersion = 1;

std::string checkpoint_json(const AnyModel& model);
AnyModel parse_checkpoint(const std::string& text);

void save_checkpoint(const AnyModel& model, const std::filesystem::path& file);
AnyModel load_checkpoint(const std::filesystem::path& file);

/// "rf_localization", "rf_blockage" or "rf_lidar_blockage".
std::string model_kind(const AnyModel& model);

}  // namespace mmblock
