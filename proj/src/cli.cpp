#include "mmblock/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "mmblock/checkpoint.hpp"
#include "mmblock/config.hpp"
#include "mmblock/eval.hpp"
#include "mmblock/geometry.hpp"
#include "mmblock/ingest.hpp"
#include "mmblock/manifest.hpp"
#include "mmblock/models.hpp"
#include "mmblock/preprocess.hpp"
#include "mmblock/text.hpp"

namespace mmblock::cli {

namespace fs = std::filesystem;
using text::format_double;

namespace {

std::string underscored(std::string s) {
  for (auto& c : s)
    if (c == '-') c = '_';
  return s;
}

std::string show(const std::string& v) { return v; }
std::string show(double v) { return format_double(v); }
template <class T>
  requires std::is_integral_v<T>
std::string show(T v) {
  return std::to_string(v);
}

void parse_into(const std::string& s, std::string& out, const std::string&) { out = s; }
void parse_into(const std::string& s, double& out, const std::string& what) {
  out = text::to_double(text::trim(s), what);
}
template <class T>
  requires std::is_integral_v<T>
void parse_into(const std::string& s, T& out, const std::string& what) {
  const long v = text::to_long(text::trim(s), what);
  if (std::is_unsigned_v<T> && v < 0)
    throw Error(ErrorKind::usage, what + ": must be nonnegative");
  out = static_cast<T>(v);
}

/// Flag > config file [section] > built-in default, with every resolved value kept
/// for the manifest.
struct Resolver {
  CLI::App* app = nullptr;
  std::string section;
  KeyValues kv;
  std::map<std::string, std::string> resolved;

  template <class T>
  void operator()(const std::string& name, T& value) {
    if (app->count("--" + name) == 0) {
      const auto it = kv.find(section + "." + underscored(name));
      if (it != kv.end()) parse_into(it->second, value, section + "." + underscored(name));
    }
    resolved[name] = show(value);
  }

  void list(const std::string& name, const std::vector<std::string>& values) {
    std::string joined;
    for (const auto& v : values) joined += (joined.empty() ? "" : ";") + v;
    resolved[name] = joined;
  }
};

struct Common {
  std::string config;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Config file (INI); sections match subcommand names")
      ->envname(kConfigEnv);
  sub->add_option("--out", c.out, "Output directory; nothing is written outside it")->required();
}

Vec2 vec2_arg(const std::string& s, const std::string& what) { return text::to_vec2(s, what); }

Rect rect_arg(const std::string& s, const std::string& what) {
  const auto v = text::to_doubles(s, what);
  if (v.size() != 4) throw Error(ErrorKind::usage, what + ": expected 'xmin ymin xmax ymax'");
  return {v[0], v[1], v[2], v[3]};
}

std::string vec_str(Vec2 v) { return format_double(v.x) + " " + format_double(v.y); }

class Run {
 public:
  Run(std::string subcommand, std::vector<std::string> argv, const Common& common)
      : start_(std::chrono::steady_clock::now()), out_(common.out) {
    manifest_.subcommand = std::move(subcommand);
    manifest_.argv = std::move(argv);
    // A config picked up from the environment must still be in the replayed invocation.
    if (!common.config.empty() &&
        std::find(manifest_.argv.begin(), manifest_.argv.end(), "--config") == manifest_.argv.end()) {
      manifest_.argv.push_back("--config");
      manifest_.argv.push_back(common.config);
    }
    manifest_.output_dir = out_.generic_string();
    fs::create_directories(out_);
    if (!common.config.empty()) input(common.config);
  }

  const fs::path& out() const { return out_; }
  void input(const fs::path& p) {
    for (auto& d : digest_input(p)) manifest_.inputs.push_back(std::move(d));
  }
  void write(const std::string& name, const std::string& contents) {
    text::write_file((out_ / name).string(), contents);
  }

  void finish(std::map<std::string, std::string> config, std::uint64_t seed) {
    manifest_.config = std::move(config);
    manifest_.seed = seed;
    manifest_.outputs = digest_directory(out_);
    manifest_.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write(kManifestName, manifest_json(manifest_));
  }

 private:
  std::chrono::steady_clock::time_point start_;
  fs::path out_;
  RunManifest manifest_;
};

KeyValues load_config(const Common& c) {
  return c.config.empty() ? KeyValues{} : read_key_values(c.config);
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::uint64_t seed = 1;
  long steps = 0;
};

void do_simulate(CLI::App* sub, SimulateArgs& a, const std::vector<std::string>& argv) {
  const auto kv = load_config(a.common);
  std::optional<std::uint64_t> seed;
  if (sub->count("--seed")) seed = a.seed;
  ScenarioConfig cfg = a.common.config.empty() ? standard_scenario(seed.value_or(1))
                                               : scenario_from(kv, seed);
  if (sub->count("--steps")) cfg.steps = a.steps;
  cfg = resolve(cfg);
  Run run("simulate", argv, a.common);
  const auto sim = simulate_scenario(cfg.world, cfg.codebook(), cfg.channel, cfg.steps, cfg.seed);
  save_scenario(run.out(), sim, cfg);
  auto resolved = parse_key_values(to_ini(cfg));
  run.finish(std::map<std::string, std::string>(resolved.begin(), resolved.end()), cfg.seed);
}

// ---------------------------------------------------------------------------

struct LabelArgs {
  Common common;
  std::vector<std::string> scenarios;
  long t0 = 8;
  long horizon = 5;
  double eps = 2.0;
  long min_pts = 4;
  double proximity = 1.0;
  std::string road = "-16 2.5 16 8";
  double r0 = 0.0;
  long lidar_bins = 360;
  double lidar_max_range = 0.0;
  double train_ratio = 0.7;
  double val_ratio = 0.15;
  double test_ratio = 0.15;
  std::uint64_t seed = 0;
};

void do_label(CLI::App* sub, LabelArgs& a, const std::vector<std::string>& argv) {
  Resolver r{sub, "label", load_config(a.common), {}};
  r.list("scenario", a.scenarios);
  r("t0", a.t0);
  r("horizon", a.horizon);
  r("eps", a.eps);
  r("min-pts", a.min_pts);
  r("proximity", a.proximity);
  r("road", a.road);
  r("r0", a.r0);
  r("lidar-bins", a.lidar_bins);
  r("train-ratio", a.train_ratio);
  r("val-ratio", a.val_ratio);
  r("test-ratio", a.test_ratio);
  r("seed", a.seed);

  Run run("label", argv, a.common);
  std::vector<ScenarioBundle> bundles;
  for (const auto& dir : a.scenarios) {
    run.input(dir);
    bundles.push_back(load_scenario(dir));
  }
  r("lidar-max-range", a.lidar_max_range);
  if (!(a.lidar_max_range > 0.0)) {
    a.lidar_max_range = 16.0;
    for (const auto& b : bundles)
      if (b.config) {
        a.lidar_max_range = b.config->world.lidar_max_range;
        break;
      }
    r.resolved["lidar-max-range"] = show(a.lidar_max_range);
  }
  if (a.min_pts < 1) throw Error(ErrorKind::invalid_argument, "min-pts must be >= 1");

  LabelConfig cfg;
  cfg.src.proximity_radius = a.proximity;
  cfg.src.road_region = rect_arg(a.road, "road");
  cfg.dbscan.eps = a.eps;
  cfg.dbscan.min_pts = static_cast<std::size_t>(a.min_pts);
  cfg.window = {a.t0, a.horizon, a.r0, static_cast<int>(a.lidar_bins), a.lidar_max_range};
  cfg.ratios = {a.train_ratio, a.val_ratio, a.test_ratio};
  cfg.seed = a.seed;
  const auto d = label_scenarios(bundles, cfg);
  r.resolved["r0"] = show(d.meta.r0);
  save_dataset(d, run.out());
  run.finish(r.resolved, a.seed);
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string dataset;
  std::string variant = "localization";
  double lr = 1e-3;
  long batch_size = 8;
  long episodes = 10;
  long iterations = 100;
  std::uint64_t seed = 0;
  double delta = 1.0;
  long horizon = 0;
};

std::string loss_curve_csv(const LossCurve& c, long iterations) {
  std::ostringstream os;
  os << "iteration,train_loss,val_loss\n";
  for (std::size_t i = 0; i < c.train.size(); ++i) {
    os << i + 1 << ',' << format_double(c.train[i]) << ',';
    const auto it = static_cast<long>(i + 1);
    if (it % iterations == 0) {
      const auto ep = static_cast<std::size_t>(it / iterations - 1);
      if (ep < c.validation.size() && std::isfinite(c.validation[ep])) os << format_double(c.validation[ep]);
    }
    os << '\n';
  }
  return os.str();
}

void do_train(CLI::App* sub, TrainArgs& a, const std::vector<std::string>& argv) {
  Resolver r{sub, "train", load_config(a.common), {}};
  r("dataset", a.dataset);
  r("variant", a.variant);
  r("lr", a.lr);
  r("batch-size", a.batch_size);
  r("episodes", a.episodes);
  r("iterations", a.iterations);
  r("seed", a.seed);
  r("delta", a.delta);
  r("horizon", a.horizon);
  if (a.dataset.empty()) throw Error(ErrorKind::usage, "--dataset is required");
  if (a.batch_size < 1) throw Error(ErrorKind::invalid_argument, "batch-size must be >= 1");

  TrainConfig cfg;
  cfg.lr = a.lr;
  cfg.batch_size = static_cast<std::size_t>(a.batch_size);
  cfg.episodes = a.episodes;
  cfg.iterations = a.iterations;
  cfg.seed = a.seed;
  cfg.delta = a.delta;
  cfg.horizon = a.horizon;

  Run run("train", argv, a.common);
  run.input(a.dataset);
  const auto d = load_dataset(a.dataset);
  AnyModel model;
  LossCurve curve;
  if (a.variant == "localization") {
    auto t = train_localization(d, cfg);
    model = std::move(t.model);
    curve = std::move(t.curve);
  } else if (a.variant == "rf" || a.variant == "rf_lidar") {
    auto t = train_blockage(d, cfg, a.variant == "rf" ? BlockageVariant::rf_only : BlockageVariant::rf_lidar);
    std::visit([&](auto& m) { model = std::move(m); }, t.model);
    curve = std::move(t.curve);
  } else {
    throw Error(ErrorKind::usage, "--variant must be localization, rf or rf_lidar");
  }
  save_checkpoint(model, run.out() / "model.json");
  run.write("loss_curve.csv", loss_curve_csv(curve, a.iterations));
  run.finish(r.resolved, a.seed);
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::vector<std::string> checkpoints;
  std::vector<std::string> scenarios;
  std::vector<std::string> rx_list;
  std::string dataset;
  std::string split = "test";
  double object_width = 4.0;
  std::string rx;
  std::string tx;
  double r0 = 0.0;
};

std::vector<std::size_t> split_indices(const DatasetFile& d, const std::string& split) {
  if (split == "all") {
    std::vector<std::size_t> all(d.samples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  return d.indices(split_from_string(split));
}

LinkGeometry resolve_link(Resolver& r, EvalArgs& a, const DatasetMeta& meta) {
  r("object-width", a.object_width);
  r("rx", a.rx);
  r("tx", a.tx);
  r("r0", a.r0);
  LinkGeometry link{a.tx.empty() ? meta.tx : vec2_arg(a.tx, "tx"),
                    a.rx.empty() ? meta.rx : vec2_arg(a.rx, "rx"), a.object_width,
                    a.r0 > 0.0 ? a.r0 : meta.r0};
  r.resolved["tx"] = vec_str(link.tx);
  r.resolved["rx"] = vec_str(link.rx);
  r.resolved["r0"] = show(link.r0);
  validate(link);
  return link;
}

std::vector<bool> truth_of(const LabeledSample& s) {
  return {s.future_blocked.begin(), s.future_blocked.end()};
}

/// Blockage decisions of any model for one sample on `link`.
std::vector<bool> decide(const AnyModel& model, const LabeledSample& s, const LinkGeometry& link) {
  if (const auto* loc = std::get_if<RfLocalizationModel>(&model))
    return predict_blockage_sequence(*loc, s.window, link);
  const BlockageModel bm = std::holds_alternative<RfBlockageModel>(model)
                               ? BlockageModel(std::get<RfBlockageModel>(model))
                               : BlockageModel(std::get<RfLidarBlockageModel>(model));
  std::vector<bool> out;
  for (double p : blockage_probabilities(bm, s)) out.push_back(p > 0.5);
  return out;
}

std::vector<std::string> method_names(const std::vector<AnyModel>& models) {
  std::map<std::string, int> total, seen;
  for (const auto& m : models) ++total[model_kind(m)];
  std::vector<std::string> names;
  for (const auto& m : models) {
    const auto kind = model_kind(m);
    names.push_back(total[kind] > 1 ? kind + "/" + std::to_string(seen[kind]++) : kind);
  }
  return names;
}

void do_predict(CLI::App* sub, EvalArgs& a, const std::vector<std::string>& argv) {
  Resolver r{sub, "predict", load_config(a.common), {}};
  r("dataset", a.dataset);
  r("split", a.split);
  if (a.checkpoints.size() != 1) throw Error(ErrorKind::usage, "predict takes exactly one --checkpoint");
  r.list("checkpoint", a.checkpoints);
  Run run("predict", argv, a.common);
  run.input(a.checkpoints.front());
  run.input(a.dataset);
  const auto model = load_checkpoint(a.checkpoints.front());
  const auto d = load_dataset(a.dataset);
  const auto link = resolve_link(r, a, d.meta);
  std::ostringstream os;
  const bool is_loc = std::holds_alternative<RfLocalizationModel>(model);
  os << (is_loc ? "scenario,t,horizon,x,y,blocked\n" : "scenario,t,horizon,probability,blocked\n");
  for (auto i : split_indices(d, a.split)) {
    const auto& s = d.samples[i];
    if (is_loc) {
      const auto& m = std::get<RfLocalizationModel>(model);
      const auto locs = predict_locations(m, s.window);
      const auto blocked = predict_blockage_sequence(m, s.window, link);
      for (std::size_t h = 0; h < locs.size(); ++h)
        os << s.scenario << ',' << s.t << ',' << h + 1 << ',' << format_double(locs[h].x) << ','
           << format_double(locs[h].y) << ',' << (blocked[h] ? 1 : 0) << '\n';
    } else {
      const BlockageModel bm = std::holds_alternative<RfBlockageModel>(model)
                                   ? BlockageModel(std::get<RfBlockageModel>(model))
                                   : BlockageModel(std::get<RfLidarBlockageModel>(model));
      const auto probs = blockage_probabilities(bm, s);
      for (std::size_t h = 0; h < probs.size(); ++h)
        os << s.scenario << ',' << s.t << ',' << h + 1 << ',' << format_double(probs[h]) << ','
           << (probs[h] > 0.5 ? 1 : 0) << '\n';
    }
  }
  run.write("predictions.csv", os.str());
  run.finish(r.resolved, 0);
}

void do_evaluate(CLI::App* sub, EvalArgs& a, const std::vector<std::string>& argv) {
  Resolver r{sub, "evaluate", load_config(a.common), {}};
  r("dataset", a.dataset);
  r("split", a.split);
  r.list("checkpoint", a.checkpoints);
  Run run("evaluate", argv, a.common);
  std::vector<AnyModel> models;
  for (const auto& c : a.checkpoints) {
    run.input(c);
    models.push_back(load_checkpoint(c));
  }
  run.input(a.dataset);
  const auto d = load_dataset(a.dataset);
  const auto link = resolve_link(r, a, d.meta);
  const auto idx = split_indices(d, a.split);
  if (idx.empty()) throw Error(ErrorKind::empty_split, "split '" + a.split + "' has no samples");

  const auto names = method_names(models);
  std::vector<MethodReport> reports;
  std::ostringstream dump;
  dump << "method,scenario,t,horizon,predicted,actual\n";
  std::map<std::string, std::vector<std::vector<double>>> per_kind;
  for (std::size_t k = 0; k < models.size(); ++k) {
    std::vector<std::vector<bool>> pred(idx.size()), truth(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const auto& s = d.samples[idx[j]];
      pred[j] = decide(models[k], s, link);
      truth[j] = truth_of(s);
      for (std::size_t h = 0; h < pred[j].size(); ++h)
        dump << names[k] << ',' << s.scenario << ',' << s.t << ',' << h + 1 << ',' << (pred[j][h] ? 1 : 0)
             << ',' << (truth[j][h] ? 1 : 0) << '\n';
    }
    MethodReport rep{names[k], evaluate_blockage(pred, truth), std::nullopt};
    if (const auto* loc = std::get_if<RfLocalizationModel>(&models[k])) {
      std::vector<std::vector<Centroid>> lp, lt;
      for (auto i : idx) {
        lp.push_back(predict_locations(*loc, d.samples[i].window));
        lt.push_back(d.samples[i].future);
      }
      rep.localization = evaluate_localization(lp, lt);
    }
    std::vector<double> acc;
    for (const auto& c : rep.blockage.per_step) acc.push_back(c.accuracy());
    per_kind[model_kind(models[k])].push_back(acc);
    reports.push_back(std::move(rep));
  }
  run.write("aggregate.csv", aggregate_csv(reports));
  run.write("per_horizon.csv", per_horizon_csv(reports));
  run.write("localization.csv", localization_csv(reports));
  run.write("predictions.csv", dump.str());
  std::string table = text_table(reports);

  std::vector<std::string> kinds;
  std::vector<SeedSummary> summaries;
  std::ostringstream per_seed;
  per_seed << "method,run,horizon,accuracy\n";
  for (const auto& [kind, runs] : per_kind) {
    for (std::size_t s = 0; s < runs.size(); ++s)
      for (std::size_t h = 0; h < runs[s].size(); ++h)
        per_seed << kind << ',' << s << ',' << h + 1 << ',' << format_double(runs[s][h]) << '\n';
    if (runs.size() >= 2) {
      kinds.push_back(kind);
      summaries.push_back(multi_seed_report(runs));
    }
  }
  run.write("per_seed.csv", per_seed.str());
  if (!kinds.empty()) {
    const auto summary = seed_summary_csv(kinds, summaries);
    run.write("seed_summary.csv", summary);
    table += "\n" + summary;
  }
  run.write("report.txt", table);
  std::cout << table;
  run.finish(r.resolved, 0);
}

void do_transfer(CLI::App* sub, EvalArgs& a, const std::vector<std::string>& argv) {
  Resolver r{sub, "transfer", load_config(a.common), {}};
  r("dataset", a.dataset);
  r("split", a.split);
  r.list("checkpoint", a.checkpoints);
  r.list("scenario", a.scenarios);
  r.list("rx-list", a.rx_list);
  Run run("transfer", argv, a.common);
  std::vector<AnyModel> models;
  for (const auto& c : a.checkpoints) {
    run.input(c);
    models.push_back(load_checkpoint(c));
  }
  run.input(a.dataset);
  const auto d = load_dataset(a.dataset);
  const auto link = resolve_link(r, a, d.meta);
  std::map<std::string, WorldState> worlds;
  for (const auto& dir : a.scenarios) {
    run.input(fs::path(dir) / "scenario.cfg");
    const fs::path p(dir);
    auto name = p.filename().string();
    if (name.empty()) name = p.parent_path().filename().string();
    worlds[name] = resolve(scenario_from(read_key_values(p / "scenario.cfg"))).world;
  }
  const auto idx = split_indices(d, a.split);
  if (idx.empty()) throw Error(ErrorKind::empty_split, "split '" + a.split + "' has no samples");
  for (auto i : idx)
    if (!worlds.count(d.samples[i].scenario))
      throw Error(ErrorKind::invalid_argument,
                  "no --scenario directory for dataset scenario '" + d.samples[i].scenario + "'");

  std::vector<Vec2> positions{link.rx};
  for (const auto& s : a.rx_list) positions.push_back(vec2_arg(s, "rx-list"));
  const auto names = method_names(models);

  // Baselines do not look at the link, so their decisions are computed once.
  std::vector<std::vector<std::vector<bool>>> fixed(models.size());
  for (std::size_t k = 0; k < models.size(); ++k)
    if (!std::holds_alternative<RfLocalizationModel>(models[k]))
      for (auto i : idx) fixed[k].push_back(decide(models[k], d.samples[i], link));

  std::ostringstream os;
  os << "method,position,rx_x,rx_y,accuracy,precision,total\n";
  for (std::size_t p = 0; p < positions.size(); ++p) {
    const auto moved = transfer_link(link, positions[p]);
    std::vector<std::vector<bool>> truth;
    for (auto i : idx)
      truth.push_back(occlusion_sequence(worlds.at(d.samples[i].scenario), moved, d.samples[i].t,
                                         d.meta.horizon));
    for (std::size_t k = 0; k < models.size(); ++k) {
      std::vector<std::vector<bool>> pred = fixed[k];
      if (pred.empty())
        for (auto i : idx) pred.push_back(decide(models[k], d.samples[i], moved));
      const auto c = evaluate_blockage(pred, truth).aggregate;
      const auto prec = c.precision();
      os << names[k] << ',' << (p == 0 ? std::string("original") : std::to_string(p)) << ','
         << format_double(positions[p].x) << ',' << format_double(positions[p].y) << ','
         << format_double(c.accuracy()) << ',' << (prec ? format_double(*prec) : "") << ','
         << c.total() << '\n';
    }
  }
  run.write("transfer.csv", os.str());
  std::cout << os.str();
  run.finish(r.resolved, 0);
}

// ---------------------------------------------------------------------------

struct ReplayArgs {
  std::string manifest;
  std::string out;
};

int do_replay(const ReplayArgs& a) {
  const auto m = parse_manifest(text::read_file(a.manifest));
  for (const auto& in : m.inputs) {
    if (!fs::exists(in.path) || sha256_file(in.path) != in.sha256)
      throw Error(ErrorKind::config_mismatch, "input " + in.path + " changed since the recorded run");
  }
  std::vector<std::string> argv = m.argv;
  bool replaced = false;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    if (argv[i] == "--out" && i + 1 < argv.size()) {
      argv[i + 1] = a.out;
      replaced = true;
    } else if (argv[i].rfind("--out=", 0) == 0) {
      argv[i] = "--out=" + a.out;
      replaced = true;
    }
  }
  if (!replaced) throw Error(ErrorKind::schema_mismatch, "manifest argv has no --out");
  const int code = run(argv);
  if (code != 0) return code;
  const auto now = digest_directory(a.out);
  if (now == m.outputs) {
    std::cout << "replay identical: " << now.size() << " files\n";
    return 0;
  }
  std::map<std::string, std::string> before, after;
  for (const auto& d : m.outputs) before[d.path] = d.sha256;
  for (const auto& d : now) after[d.path] = d.sha256;
  for (const auto& [path, sha] : before)
    if (!after.count(path) || after[path] != sha) std::cerr << "differs: " << path << '\n';
  for (const auto& [path, sha] : after)
    if (!before.count(path)) std::cerr << "extra: " << path << '\n';
  return 1;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"mmWave blockage prediction pipeline", "mmblock"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Simulate a scenario into rssi/lidar/truth CSVs");
  add_common(s_sim, sim.common);
  s_sim->add_option("--seed", sim.seed, "Scenario seed (overrides [scenario] seed)");
  s_sim->add_option("--steps", sim.steps, "Steps to simulate; 0 = until traffic clears");

  LabelArgs lab;
  auto* s_lab = app.add_subcommand("label", "Self-supervised labeling of scenario directories");
  add_common(s_lab, lab.common);
  s_lab->add_option("--scenario", lab.scenarios, "Scenario directory (repeatable)")->required();
  s_lab->add_option("--t0", lab.t0, "Observation window length")->capture_default_str();
  s_lab->add_option("--horizon", lab.horizon, "Prediction horizon N")->capture_default_str();
  s_lab->add_option("--eps", lab.eps, "DBSCAN neighborhood radius, meters")->capture_default_str();
  s_lab->add_option("--min-pts", lab.min_pts, "DBSCAN core threshold")->capture_default_str();
  s_lab->add_option("--proximity", lab.proximity, "Clutter radius around the sensor, meters")
      ->capture_default_str();
  s_lab->add_option("--road", lab.road, "Road region 'xmin ymin xmax ymax', transmitter-local")
      ->capture_default_str();
  s_lab->add_option("--r0", lab.r0, "Blockage power threshold; 0 = calibrate from truth.csv");
  s_lab->add_option("--lidar-bins", lab.lidar_bins, "Polar raster width")->capture_default_str();
  s_lab->add_option("--lidar-max-range", lab.lidar_max_range, "0 = take from scenario.cfg");
  s_lab->add_option("--train-ratio", lab.train_ratio)->capture_default_str();
  s_lab->add_option("--val-ratio", lab.val_ratio)->capture_default_str();
  s_lab->add_option("--test-ratio", lab.test_ratio)->capture_default_str();
  s_lab->add_option("--seed", lab.seed, "Recorded only; the split is a time-block split");

  TrainArgs tr;
  auto* s_tr = app.add_subcommand("train", "Train a model on a dataset");
  add_common(s_tr, tr.common);
  s_tr->add_option("--dataset", tr.dataset, "Dataset directory");
  s_tr->add_option("--variant", tr.variant, "localization | rf | rf_lidar")->capture_default_str();
  s_tr->add_option("--lr", tr.lr)->capture_default_str();
  s_tr->add_option("--batch-size", tr.batch_size)->capture_default_str();
  s_tr->add_option("--episodes", tr.episodes)->capture_default_str();
  s_tr->add_option("--iterations", tr.iterations, "Minibatches per episode")->capture_default_str();
  s_tr->add_option("--seed", tr.seed)->capture_default_str();
  s_tr->add_option("--delta", tr.delta, "Huber threshold")->capture_default_str();
  s_tr->add_option("--horizon", tr.horizon, "Expected N; 0 accepts the dataset's");

  EvalArgs pr, ev, tf;
  auto* s_pr = app.add_subcommand("predict", "Run one checkpoint over a dataset split");
  auto* s_ev = app.add_subcommand("evaluate", "Blockage and localization metrics for checkpoints");
  auto* s_tf = app.add_subcommand("transfer", "Zero-shot evaluation at moved receiver positions");
  for (auto [sub, e] : {std::pair{s_pr, &pr}, std::pair{s_ev, &ev}, std::pair{s_tf, &tf}}) {
    add_common(sub, e->common);
    sub->add_option("--checkpoint", e->checkpoints, "Checkpoint file (repeatable)")->required();
    sub->add_option("--dataset", e->dataset, "Dataset directory");
    sub->add_option("--split", e->split, "train | validation | test | all")->capture_default_str();
    sub->add_option("--object-width", e->object_width, "Object width omega, meters")
        ->capture_default_str();
    sub->add_option("--tx", e->tx, "Transmitter 'x y'; default from the dataset");
    sub->add_option("--rx", e->rx, "Receiver 'x y'; default from the dataset");
    sub->add_option("--r0", e->r0, "Power threshold; default from the dataset");
  }
  s_tf->add_option("--scenario", tf.scenarios, "Scenario directories with scenario.cfg")->required();
  s_tf->add_option("--rx-list", tf.rx_list, "Moved receiver 'x y' (repeatable)")->required();

  ReplayArgs rp;
  auto* s_rp = app.add_subcommand("replay", "Re-run a manifest and compare output checksums");
  s_rp->add_option("manifest", rp.manifest, "manifest.json of the recorded run")->required();
  s_rp->add_option("--out", rp.out, "Fresh output directory")->required();

  if (args.empty()) {
    std::cerr << app.help();
    return 2;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << '\n';
    for (auto* sub : app.get_subcommands()) {
      std::cerr << sub->help();
      return 2;
    }
    std::cerr << app.help();
    return 2;
  }

  try {
    if (s_sim->parsed()) do_simulate(s_sim, sim, args);
    if (s_lab->parsed()) do_label(s_lab, lab, args);
    if (s_tr->parsed()) do_train(s_tr, tr, args);
    if (s_pr->parsed()) do_predict(s_pr, pr, args);
    if (s_ev->parsed()) do_evaluate(s_ev, ev, args);
    if (s_tf->parsed()) do_transfer(s_tf, tf, args);
    if (s_rp->parsed()) return do_replay(rp);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mmblock::cli
