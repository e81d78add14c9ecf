#include "mmblock/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mmblock/text.hpp"

namespace mmblock {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "train";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "validation") return Split::validation;
  if (s == "test") return Split::test;
  throw Error(ErrorKind::parse_error, "unknown split tag '" + s + "'");
}

std::vector<std::size_t> DatasetFile::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == s) out.push_back(i);
  return out;
}

namespace {

struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const fs::path& path) {
  CsvTable table;
  table.file = path.filename().string();
  std::istringstream in(text::read_file(path.string()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    for (auto f : text::split(line, ',')) fields.emplace_back(text::trim(f));
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size())
      throw Error(ErrorKind::parse_error, table.file + " line " + std::to_string(line_no) +
                                              ": expected " + std::to_string(table.header.size()) +
                                              " fields, got " + std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) throw Error(ErrorKind::parse_error, table.file + ": missing header");
  return table;
}

std::string where(const CsvTable& t, std::size_t row, std::size_t col) {
  return t.file + " line " + std::to_string(t.line_numbers[row]) + " column " + t.header[col];
}

double finite_cell(const CsvTable& t, std::size_t row, std::size_t col) {
  double v = 0.0;
  if (!text::parse_double(t.rows[row][col], v))
    throw Error(ErrorKind::parse_error,
                where(t, row, col) + ": expected a number, got '" + t.rows[row][col] + "'");
  if (!std::isfinite(v))
    throw Error(ErrorKind::parse_error,
                where(t, row, col) + ": non-finite value '" + t.rows[row][col] + "'");
  return v;
}

long index_cell(const CsvTable& t, std::size_t row, std::size_t col) {
  long v = 0;
  if (!text::parse_long(t.rows[row][col], v))
    throw Error(ErrorKind::parse_error,
                where(t, row, col) + ": expected an integer, got '" + t.rows[row][col] + "'");
  return v;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& expected) {
  if (t.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw Error(ErrorKind::schema_mismatch, t.file + ": expected header '" + want + "'");
  }
}

std::string rssi_header(int beams) {
  std::string h = "t";
  for (int m = 0; m < beams; ++m) h += ",p" + std::to_string(m);
  return h;
}

}  // namespace

void save_scenario(const fs::path& dir, const SimulationResult& sim, const ScenarioConfig& config) {
  fs::create_directories(dir);
  const int beams = sim.rssi.empty() ? 0 : static_cast<int>(sim.rssi.front().powers.size());
  std::string rssi = rssi_header(beams) + "\n";
  for (const auto& f : sim.rssi) {
    rssi += std::to_string(f.t);
    for (double p : f.powers) rssi += "," + text::format_double(p);
    rssi += "\n";
  }
  text::write_file((dir / "rssi.csv").string(), rssi);

  std::string lidar = "t,angle,depth\n";
  for (const auto& scan : sim.lidar)
    for (const auto& p : scan.points)
      lidar += std::to_string(scan.t) + "," + text::format_double(p.angle) + "," +
               text::format_double(p.depth) + "\n";
  text::write_file((dir / "lidar.csv").string(), lidar);

  std::string truth = "t,x,y,blocked\n";
  for (std::size_t i = 0; i < sim.truth.size(); ++i) {
    const auto& c = sim.truth[i];
    truth += std::to_string(c.t) + "," + (c.valid ? text::format_double(c.x) : "nan") + "," +
             (c.valid ? text::format_double(c.y) : "nan") + "," +
             (sim.labels[i].blocked ? "1" : "0") + "\n";
  }
  text::write_file((dir / "truth.csv").string(), truth);
  text::write_file((dir / "scenario.cfg").string(), to_ini(config));
}

ScenarioBundle make_bundle(std::string name, const SimulationResult& sim,
                           const ScenarioConfig& config) {
  ScenarioBundle b;
  b.name = std::move(name);
  b.rssi = sim.rssi;
  b.lidar = sim.lidar;
  b.truth = sim.truth;
  b.labels = sim.labels;
  b.config = resolve(config);
  b.rssi_rows = b.rssi.size();
  for (const auto& s : b.lidar) b.lidar_rows += s.points.size();
  b.truth_rows = b.truth.size();
  return b;
}

ScenarioBundle load_scenario(const fs::path& dir) {
  ScenarioBundle b;
  b.name = dir.filename().string();
  if (b.name.empty()) b.name = dir.parent_path().filename().string();
  if (!fs::exists(dir / "rssi.csv") || !fs::exists(dir / "lidar.csv"))
    throw Error(ErrorKind::schema_mismatch, dir.string() + ": needs rssi.csv and lidar.csv");

  const auto rssi = read_csv(dir / "rssi.csv");
  if (rssi.header.size() < 2 || rssi.header[0] != "t")
    throw Error(ErrorKind::schema_mismatch, "rssi.csv: expected header 't,p0,...'");
  const int beams = static_cast<int>(rssi.header.size()) - 1;
  {
    std::vector<std::string> expected{"t"};
    for (int m = 0; m < beams; ++m) expected.push_back("p" + std::to_string(m));
    expect_header(rssi, expected);
  }
  b.rssi_rows = rssi.rows.size();
  std::vector<long> missing;
  for (std::size_t r = 0; r < rssi.rows.size(); ++r) {
    RssiFrame f;
    f.t = index_cell(rssi, r, 0);
    f.powers.resize(static_cast<std::size_t>(beams));
    for (int m = 0; m < beams; ++m) {
      const double p = finite_cell(rssi, r, static_cast<std::size_t>(m) + 1);
      if (p < 0.0)
        throw Error(ErrorKind::parse_error,
                    where(rssi, r, static_cast<std::size_t>(m) + 1) + ": negative power");
      f.powers[static_cast<std::size_t>(m)] = p;
    }
    if (!b.rssi.empty()) {
      const long prev = b.rssi.back().t;
      if (f.t <= prev)
        throw Error(ErrorKind::schema_mismatch, where(rssi, r, 0) + ": time index not increasing");
      for (long t = prev + 1; t < f.t; ++t) missing.push_back(t);
    }
    b.rssi.push_back(std::move(f));
  }
  if (!missing.empty()) {
    std::string list;
    for (long t : missing) list += (list.empty() ? "" : ",") + std::to_string(t);
    throw Error(ErrorKind::time_index_gap, "rssi.csv is missing time indices " + list);
  }

  const auto lidar = read_csv(dir / "lidar.csv");
  expect_header(lidar, {"t", "angle", "depth"});
  b.lidar_rows = lidar.rows.size();
  b.lidar.resize(b.rssi.size());
  const long t_first = b.rssi.empty() ? 0 : b.rssi.front().t;
  for (std::size_t i = 0; i < b.rssi.size(); ++i) b.lidar[i].t = b.rssi[i].t;
  for (std::size_t r = 0; r < lidar.rows.size(); ++r) {
    const long t = index_cell(lidar, r, 0);
    const double angle = finite_cell(lidar, r, 1);
    const double depth = finite_cell(lidar, r, 2);
    if (t < t_first || t - t_first >= static_cast<long>(b.rssi.size()))
      throw Error(ErrorKind::schema_mismatch,
                  where(lidar, r, 0) + ": time index " + std::to_string(t) + " has no rssi row");
    if (angle < 0.0 || angle >= kTwoPi)
      throw Error(ErrorKind::parse_error, where(lidar, r, 1) + ": angle outside [0, 2pi)");
    if (!(depth > 0.0))
      throw Error(ErrorKind::parse_error, where(lidar, r, 2) + ": depth must be positive");
    b.lidar[static_cast<std::size_t>(t - t_first)].points.push_back({angle, depth});
  }

  if (fs::exists(dir / "truth.csv")) {
    const auto truth = read_csv(dir / "truth.csv");
    expect_header(truth, {"t", "x", "y", "blocked"});
    b.truth_rows = truth.rows.size();
    if (truth.rows.size() != b.rssi.size())
      throw Error(ErrorKind::schema_mismatch, "truth.csv row count differs from rssi.csv");
    for (std::size_t r = 0; r < truth.rows.size(); ++r) {
      Centroid c;
      c.t = index_cell(truth, r, 0);
      if (c.t != b.rssi[r].t)
        throw Error(ErrorKind::schema_mismatch, where(truth, r, 0) + ": time index mismatch");
      double x = 0.0, y = 0.0;
      if (!text::parse_double(truth.rows[r][1], x) || !text::parse_double(truth.rows[r][2], y))
        throw Error(ErrorKind::parse_error, where(truth, r, 1) + ": expected a number or nan");
      c.valid = std::isfinite(x) && std::isfinite(y);
      if (c.valid) {
        c.x = x;
        c.y = y;
      }
      const long blocked = index_cell(truth, r, 3);
      if (blocked != 0 && blocked != 1)
        throw Error(ErrorKind::parse_error, where(truth, r, 3) + ": expected 0 or 1");
      b.truth.push_back(c);
      b.labels.push_back({c.t, blocked == 1});
    }
  }
  if (fs::exists(dir / "scenario.cfg")) b.config = scenario_from(read_key_values(dir / "scenario.cfg"));
  return b;
}

namespace {

json meta_to_json(const DatasetMeta& m, std::size_t count) {
  json j;
  j["format_version"] = kDatasetFormatVersion;
  j["sample_count"] = count;
  j["t0"] = m.t0;
  j["horizon"] = m.horizon;
  j["num_beams"] = m.num_beams;
  j["lidar_bins"] = m.lidar_bins;
  j["lidar_max_range"] = m.lidar_max_range;
  j["r0"] = m.r0;
  j["labeling"] = {{"eps", m.eps}, {"min_pts", m.min_pts}, {"proximity_radius", m.proximity_radius}};
  j["road_region"] = {m.road_region.xmin, m.road_region.ymin, m.road_region.xmax,
                      m.road_region.ymax};
  j["link"] = {{"tx", {m.tx.x, m.tx.y}}, {"rx", {m.rx.x, m.rx.y}}};
  j["split_ratios"] = {m.ratios.train, m.ratios.validation, m.ratios.test};
  j["scenarios"] = m.scenarios;
  j["columns"] =
      "split,scenario,t,label_x,label_y,fx{h},fy{h} for h=1..horizon,b{h} for h=1..horizon,"
      "r{tau}_{m} for tau=0..t0-1 (oldest first) and m=0..num_beams-1,d{k} for k=0..lidar_bins-1";
  return j;
}

DatasetMeta meta_from_json(const json& j) {
  DatasetMeta m;
  m.version = j.at("format_version").get<int>();
  m.t0 = j.at("t0").get<long>();
  m.horizon = j.at("horizon").get<long>();
  m.num_beams = j.at("num_beams").get<int>();
  m.lidar_bins = j.at("lidar_bins").get<int>();
  m.lidar_max_range = j.at("lidar_max_range").get<double>();
  m.r0 = j.at("r0").get<double>();
  m.eps = j.at("labeling").at("eps").get<double>();
  m.min_pts = j.at("labeling").at("min_pts").get<long>();
  m.proximity_radius = j.at("labeling").at("proximity_radius").get<double>();
  const auto rr = j.at("road_region");
  m.road_region = {rr.at(0).get<double>(), rr.at(1).get<double>(), rr.at(2).get<double>(),
                   rr.at(3).get<double>()};
  m.tx = {j.at("link").at("tx").at(0).get<double>(), j.at("link").at("tx").at(1).get<double>()};
  m.rx = {j.at("link").at("rx").at(0).get<double>(), j.at("link").at("rx").at(1).get<double>()};
  const auto sr = j.at("split_ratios");
  m.ratios = {sr.at(0).get<double>(), sr.at(1).get<double>(), sr.at(2).get<double>()};
  m.scenarios = j.at("scenarios").get<std::vector<std::string>>();
  return m;
}

}  // namespace

void save_dataset(const DatasetFile& d, const fs::path& dir) {
  if (d.splits.size() != d.samples.size())
    throw Error(ErrorKind::length_mismatch, "dataset needs one split tag per sample");
  fs::create_directories(dir);
  const auto& m = d.meta;
  std::string out = "split,scenario,t,label_x,label_y";
  for (long h = 1; h <= m.horizon; ++h)
    out += ",fx" + std::to_string(h) + ",fy" + std::to_string(h);
  for (long h = 1; h <= m.horizon; ++h) out += ",b" + std::to_string(h);
  for (long tau = 0; tau < m.t0; ++tau)
    for (int b = 0; b < m.num_beams; ++b)
      out += ",r" + std::to_string(tau) + "_" + std::to_string(b);
  for (int k = 0; k < m.lidar_bins; ++k) out += ",d" + std::to_string(k);
  out += "\n";

  const auto f = [](double v) { return text::format_double(v); };
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const auto& s = d.samples[i];
    if (static_cast<long>(s.window.size()) != m.t0 ||
        static_cast<long>(s.future.size()) != m.horizon ||
        static_cast<long>(s.future_blocked.size()) != m.horizon ||
        static_cast<int>(s.lidar_depth.size()) != m.lidar_bins)
      throw Error(ErrorKind::shape_mismatch,
                  "sample " + std::to_string(i) + " does not match dataset metadata");
    if (s.scenario.find(',') != std::string::npos)
      throw Error(ErrorKind::invalid_argument, "scenario names may not contain commas");
    out += std::string(to_string(d.splits[i])) + "," + s.scenario + "," + std::to_string(s.t) +
           "," + f(s.label.x) + "," + f(s.label.y);
    for (const auto& c : s.future) out += "," + f(c.x) + "," + f(c.y);
    for (auto b : s.future_blocked) out += b ? ",1" : ",0";
    for (const auto& frame : s.window) {
      if (static_cast<int>(frame.powers.size()) != m.num_beams)
        throw Error(ErrorKind::shape_mismatch, "window frame width differs from num_beams");
      for (double p : frame.powers) out += "," + f(p);
    }
    for (double v : s.lidar_depth) out += "," + f(v);
    out += "\n";
  }
  text::write_file((dir / "samples.csv").string(), out);
  text::write_file((dir / "dataset.json").string(), meta_to_json(m, d.samples.size()).dump(2) + "\n");
}

DatasetFile load_dataset(const fs::path& dir) {
  json j;
  try {
    j = json::parse(text::read_file((dir / "dataset.json").string()));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, "dataset.json: " + std::string(e.what()));
  }
  const int version = j.value("format_version", -1);
  if (version != kDatasetFormatVersion)
    throw Error(ErrorKind::version_mismatch, "dataset.json: unsupported format_version " +
                                                 std::to_string(version));
  DatasetFile d;
  try {
    d.meta = meta_from_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema_mismatch, "dataset.json: " + std::string(e.what()));
  }
  const auto& m = d.meta;
  const auto table = read_csv(dir / "samples.csv");
  const std::size_t expected_cols = 5 + 3 * static_cast<std::size_t>(m.horizon) +
                                    static_cast<std::size_t>(m.t0 * m.num_beams) +
                                    static_cast<std::size_t>(m.lidar_bins);
  if (table.header.size() != expected_cols)
    throw Error(ErrorKind::schema_mismatch, "samples.csv column count does not match dataset.json");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    LabeledSample s;
    d.splits.push_back(split_from_string(row[0]));
    s.scenario = row[1];
    s.t = index_cell(table, r, 2);
    std::size_t col = 3;
    s.label = {s.t, finite_cell(table, r, col), finite_cell(table, r, col + 1), true};
    col += 2;
    for (long h = 1; h <= m.horizon; ++h, col += 2)
      s.future.push_back({s.t + h, finite_cell(table, r, col), finite_cell(table, r, col + 1), true});
    for (long h = 1; h <= m.horizon; ++h, ++col) {
      const long b = index_cell(table, r, col);
      if (b != 0 && b != 1) throw Error(ErrorKind::parse_error, where(table, r, col) + ": expected 0 or 1");
      s.future_blocked.push_back(static_cast<std::uint8_t>(b));
    }
    for (long tau = 0; tau < m.t0; ++tau) {
      RssiFrame f{s.t - m.t0 + 1 + tau, {}};
      for (int b = 0; b < m.num_beams; ++b, ++col) f.powers.push_back(finite_cell(table, r, col));
      s.window.push_back(std::move(f));
    }
    for (int k = 0; k < m.lidar_bins; ++k, ++col) s.lidar_depth.push_back(finite_cell(table, r, col));
    d.samples.push_back(std::move(s));
  }
  if (j.value("sample_count", static_cast<std::size_t>(0)) != d.samples.size())
    throw Error(ErrorKind::schema_mismatch, "samples.csv row count differs from dataset.json");
  return d;
}

DatasetFile split_dataset(std::vector<LabeledSample> samples, SplitRatios ratios,
                          std::uint64_t /*seed*/, DatasetMeta meta) {
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (!(ratios.train > 0.0) || !(ratios.validation > 0.0) || !(ratios.test > 0.0) ||
      std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorKind::invalid_ratio, "split ratios must be positive and sum to 1");

  std::vector<std::string> order;
  std::map<std::string, std::vector<LabeledSample>> groups;
  for (auto& s : samples) {
    if (!groups.count(s.scenario)) order.push_back(s.scenario);
    groups[s.scenario].push_back(std::move(s));
  }
  DatasetFile d;
  d.meta = std::move(meta);
  d.meta.ratios = ratios;
  if (d.meta.scenarios.empty()) d.meta.scenarios = order;
  for (const auto& name : order) {
    auto& g = groups[name];
    std::stable_sort(g.begin(), g.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    const auto n = static_cast<double>(g.size());
    const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * n + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(ratios.validation * n + 1e-9));
    for (std::size_t i = 0; i < g.size(); ++i) {
      d.splits.push_back(i < n_train ? Split::train
                                     : (i < n_train + n_val ? Split::validation : Split::test));
      d.samples.push_back(std::move(g[i]));
    }
  }
  return d;
}

}  // namespace mmblock
