#include "mmblock/checkpoint.hpp"

#include <json.hpp>

#include "mmblock/text.hpp"

namespace mmblock {

using nlohmann::json;

namespace {

json norm_json(const InputNormalization& n) { return {{"db_mean", n.db_mean}, {"db_std", n.db_std}}; }

InputNormalization norm_from(const json& j) {
  return {j.at("db_mean").get<double>(), j.at("db_std").get<double>()};
}

template <class Model>
json params_json(const Model& m) {
  Model copy = m;
  json arrays = json::array();
  for (auto view : parameters(copy)) arrays.push_back(std::vector<double>(view.begin(), view.end()));
  return arrays;
}

template <class Model>
void fill_params(Model& m, const json& arrays) {
  auto views = parameters(m);
  if (!arrays.is_array() || arrays.size() != views.size())
    throw Error(ErrorKind::schema_mismatch, "checkpoint has the wrong number of parameter arrays");
  for (std::size_t k = 0; k < views.size(); ++k) {
    const auto& a = arrays[k];
    if (!a.is_array() || a.size() != views[k].size())
      throw Error(ErrorKind::shape_mismatch, "checkpoint parameter array " + std::to_string(k) +
                                                 " has the wrong length");
    for (std::size_t i = 0; i < views[k].size(); ++i) views[k][i] = a[i].get<double>();
  }
}

}  // namespace

std::string model_kind(const AnyModel& model) {
  switch (model.index()) {
    case 0: return "rf_localization";
    case 1: return "rf_blockage";
    default: return "rf_lidar_blockage";
  }
}

std::string checkpoint_json(const AnyModel& model) {
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["kind"] = model_kind(model);
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        json a;
        a["num_beams"] = m.num_beams();
        a["horizon"] = m.horizon;
        a["t0"] = m.t0;
        if constexpr (std::is_same_v<M, RfLocalizationModel>) {
          a["hidden"] = m.lstm.hidden_size;
          a["dense"] = m.dense1.out();
          j["output"] = {{"extent_x", m.extent_x},
                         {"extent_y", m.extent_y},
                         {"road_origin", {m.road_origin.x, m.road_origin.y}}};
        } else if constexpr (std::is_same_v<M, RfBlockageModel>) {
          a["hidden"] = m.lstm.front().hidden_size;
          a["layers"] = m.lstm.size();
          a["dense"] = m.dense1.out();
        } else {
          a["hidden"] = m.lstm.front().hidden_size;
          a["layers"] = m.lstm.size();
          a["lidar_bins"] = m.lidar_bins;
          a["lidar_max_range"] = m.lidar_max_range;
        }
        j["architecture"] = a;
        j["input_normalization"] = norm_json(m.norm);
        j["parameters"] = params_json(m);
      },
      model);
  return j.dump(1) + "\n";
}

AnyModel parse_checkpoint(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion)
      throw Error(ErrorKind::version_mismatch, "checkpoint format " + std::to_string(version) +
                                                   ", expected " +
                                                   std::to_string(kCheckpointFormatVersion));
    const auto kind = j.at("kind").get<std::string>();
    const auto& a = j.at("architecture");
    const int beams = a.at("num_beams").get<int>();
    const long horizon = a.at("horizon").get<long>();
    const auto hidden = a.at("hidden").get<std::size_t>();
    if (kind == "rf_localization") {
      auto m = make_localization_model(beams, horizon, 0, hidden, a.at("dense").get<std::size_t>());
      m.t0 = a.at("t0").get<long>();
      m.norm = norm_from(j.at("input_normalization"));
      const auto& o = j.at("output");
      m.extent_x = o.at("extent_x").get<double>();
      m.extent_y = o.at("extent_y").get<double>();
      m.road_origin = {o.at("road_origin").at(0).get<double>(), o.at("road_origin").at(1).get<double>()};
      fill_params(m, j.at("parameters"));
      return m;
    }
    if (kind == "rf_blockage") {
      auto m = make_rf_blockage_model(beams, horizon, 0, hidden, a.at("layers").get<std::size_t>(),
                                      a.at("dense").get<std::size_t>());
      m.t0 = a.at("t0").get<long>();
      m.norm = norm_from(j.at("input_normalization"));
      fill_params(m, j.at("parameters"));
      return m;
    }
    if (kind == "rf_lidar_blockage") {
      auto m = make_rf_lidar_blockage_model(beams, horizon, a.at("lidar_bins").get<int>(),
                                            a.at("lidar_max_range").get<double>(), 0, hidden,
                                            a.at("layers").get<std::size_t>());
      m.t0 = a.at("t0").get<long>();
      m.norm = norm_from(j.at("input_normalization"));
      fill_params(m, j.at("parameters"));
      return m;
    }
    throw Error(ErrorKind::schema_mismatch, "unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema_mismatch, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const AnyModel& model, const std::filesystem::path& file) {
  text::write_file(file.string(), checkpoint_json(model));
}

AnyModel load_checkpoint(const std::filesystem::path& file) {
  return parse_checkpoint(text::read_file(file.string()));
}

}  // namespace mmblock
