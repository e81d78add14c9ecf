// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mmblock/cli.hpp"
#include "mmblock/eval.hpp"
#include "mmblock/geometry.hpp"
#include "mmblock/manifest.hpp"
#include "mmblock/models.hpp"
#include "mmblock/nn/loss.hpp"
#include "mmblock/preprocess.hpp"
#include "mmblock/text.hpp"
#include "oracles.hpp"
#include "tmpdir.hpp"

using namespace mmblock;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

int failures = 0;

// Reports computed early but printed later, to keep the output in criterion order.
std::vector<std::function<void()>> deferred;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Gradients

double weighted_sum(std::span<const double> y, std::span<const double> r) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
  return s;
}

std::vector<nn::Vector> random_sequence(std::size_t len, std::size_t dim, std::mt19937_64& rng) {
  std::vector<nn::Vector> s;
  for (std::size_t t = 0; t < len; ++t) s.push_back(oracle::random_vector(dim, rng));
  return s;
}

struct GradientCase {
  std::string name;
  std::function<double(std::uint64_t)> worst;  // max relative error for one seed
};

LabeledSample tiny_sample(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LabeledSample s;
  s.t = 2;
  for (long k = 0; k < 3; ++k) {
    RssiFrame f{k, {}};
    for (int b = 0; b < 4; ++b) f.powers.push_back(1e-3 + u(rng));
    s.window.push_back(f);
  }
  const double x = 32.0 * u(rng), y = 5.5 * u(rng);
  for (long h = 1; h <= 2; ++h) {
    s.future.push_back({2 + h, x, y, true});
    s.future_blocked.push_back(static_cast<std::uint8_t>(rng() % 2));
  }
  for (int k = 0; k < 16; ++k) s.lidar_depth.push_back(16.0 * u(rng));
  return s;
}

std::vector<GradientCase> gradient_cases() {
  std::vector<GradientCase> c;
  c.push_back({"dense", [](std::uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 auto p = nn::make_dense(12, 7, rng);
                 auto x = oracle::random_vector(12, rng);
                 const auto r = oracle::random_vector(7, rng);
                 auto g = nn::DenseParams::zeros(12, 7);
                 nn::Vector dx(12, 0.0);
                 nn::dense_backward(p, x, r, g, dx);
                 nn::ParamViews pv, gv;
                 nn::collect(p, pv);
                 nn::collect(g, gv);
                 pv.emplace_back(x);
                 gv.emplace_back(dx);
                 return oracle::check_gradients(pv, gv, [&] { return weighted_sum(nn::dense_forward(p, x), r); });
               }});
  c.push_back({"lstm", [](std::uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 auto p = nn::make_lstm(16, 8, rng);
                 auto seq = random_sequence(8, 16, rng);
                 const auto r = random_sequence(8, 8, rng);
                 auto loss = [&] {
                   const auto f = nn::lstm_forward(p, seq);
                   double s = 0.0;
                   for (std::size_t t = 0; t < 8; ++t) s += weighted_sum(f.hidden[t], r[t]);
                   return s;
                 };
                 const auto f = nn::lstm_forward(p, seq);
                 auto g = nn::LstmParams::zeros(16, 8);
                 std::vector<nn::Vector> dx;
                 nn::lstm_backward(p, f.cache, r, g, &dx);
                 nn::ParamViews pv, gv;
                 nn::collect(p, pv);
                 nn::collect(g, gv);
                 for (std::size_t t = 0; t < 8; ++t) {
                   pv.emplace_back(seq[t]);
                   gv.emplace_back(dx[t]);
                 }
                 return oracle::check_gradients(pv, gv, loss);
               }});
  c.push_back({"stacked lstm", [](std::uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 std::vector<nn::LstmParams> layers{nn::make_lstm(6, 5, rng), nn::make_lstm(5, 5, rng),
                                                    nn::make_lstm(5, 4, rng)};
                 auto seq = random_sequence(5, 6, rng);
                 const auto r = oracle::random_vector(4, rng);
                 const auto f = nn::stacked_lstm_forward(layers, seq);
                 std::vector<nn::LstmParams> g{nn::LstmParams::zeros(6, 5), nn::LstmParams::zeros(5, 5),
                                               nn::LstmParams::zeros(5, 4)};
                 nn::stacked_lstm_backward(layers, f, r, g);
                 nn::ParamViews pv, gv;
                 for (auto& l : layers) nn::collect(l, pv);
                 for (auto& l : g) nn::collect(l, gv);
                 return oracle::check_gradients(
                     pv, gv, [&] { return weighted_sum(nn::stacked_lstm_forward(layers, seq).h(), r); });
               }});
  c.push_back({"conv1d + pooling", [](std::uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 auto p = nn::make_conv1d(2, 4, 5, 2, rng);
                 nn::Tensor2 signal(2, 31);
                 for (auto& v : signal.flat()) v = std::uniform_real_distribution<double>(-1, 1)(rng);
                 const auto r = oracle::random_vector(4, rng);
                 const auto y = nn::conv1d_forward(p, signal);
                 const auto dy = nn::global_avg_pool_backward(r, y.cols());
                 auto g = nn::Conv1dParams::zeros(2, 4, 5, 2);
                 nn::Tensor2 ds;
                 nn::conv1d_backward(p, signal, dy, g, &ds);
                 nn::ParamViews pv, gv;
                 nn::collect(p, pv);
                 nn::collect(g, gv);
                 pv.push_back(signal.flat());
                 gv.push_back(ds.flat());
                 return oracle::check_gradients(pv, gv, [&] {
                   return weighted_sum(nn::global_avg_pool(nn::conv1d_forward(p, signal)), r);
                 });
               }});
  c.push_back({"huber", [](std::uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 auto pred = oracle::random_vector(10, rng, 3.0);
                 const auto target = oracle::random_vector(10, rng, 3.0);
                 auto g = nn::huber_loss(pred, target).grad;
                 return oracle::check_gradients({std::span<double>(pred)}, {std::span<double>(g)},
                                                [&] { return nn::huber_loss(pred, target).loss; });
               }});
  c.push_back({"bce (logits)", [](std::uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 auto z = oracle::random_vector(10, rng, 3.0);
                 nn::Vector target(10);
                 for (auto& t : target) t = static_cast<double>(rng() % 2);
                 auto probs = [&] {
                   nn::Vector p(z.size());
                   for (std::size_t i = 0; i < z.size(); ++i) p[i] = nn::sigmoid(z[i]);
                   return p;
                 };
                 auto g = nn::bce_loss(probs(), target).grad;
                 return oracle::check_gradients({std::span<double>(z)}, {std::span<double>(g)},
                                                [&] { return nn::bce_loss(probs(), target).loss; });
               }});
  c.push_back({"rf-localization model", [](std::uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 const auto s = tiny_sample(rng);
                 const auto feats = rssi_features(s.window, {});
                 auto m = make_localization_model(4, 2, seed, 5, 6);
                 m.extent_x = 32.0;
                 m.extent_y = 5.5;
                 // every ReLU active and |z| < delta: no kink within a finite-difference step
                 for (auto& b : m.dense1.bias) b = 1.0;
                 for (auto& w : m.dense2.weight.flat()) w *= 0.1;
                 for (auto& b : m.dense2.bias) b = 0.5;
                 const auto target = localization_target(m, s);
                 auto g = zeros_like(m);
                 localization_loss(m, feats, target, 1.0, &g);
                 return oracle::check_gradients(parameters(m), parameters(g), [&] {
                   return localization_loss(m, feats, target, 1.0, nullptr);
                 });
               }});
  c.push_back({"rf-blockage model", [](std::uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 const auto s = tiny_sample(rng);
                 const auto feats = rssi_features(s.window, {});
                 const nn::Vector target(s.future_blocked.begin(), s.future_blocked.end());
                 auto m = make_rf_blockage_model(4, 2, seed, 4, 2, 5);
                 auto g = zeros_like(m);
                 rf_blockage_loss(m, feats, target, &g);
                 return oracle::check_gradients(parameters(m), parameters(g),
                                                [&] { return rf_blockage_loss(m, feats, target, nullptr); });
               }});
  c.push_back({"rf+lidar-blockage model", [](std::uint64_t seed) {
                 std::mt19937_64 rng(seed);
                 const auto s = tiny_sample(rng);
                 const auto feats = rssi_features(s.window, {});
                 const auto lidar = lidar_features(s.lidar_depth, 16.0);
                 const nn::Vector target(s.future_blocked.begin(), s.future_blocked.end());
                 auto m = make_rf_lidar_blockage_model(4, 2, 16, 16.0, seed, 4, 2);
                 auto g = zeros_like(m);
                 rf_lidar_blockage_loss(m, feats, lidar, target, &g);
                 return oracle::check_gradients(parameters(m), parameters(g), [&] {
                   return rf_lidar_blockage_loss(m, feats, lidar, target, nullptr);
                 });
               }});
  return c;
}

void criterion_gradients() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_name;
  for (const auto& c : gradient_cases()) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const double e = c.worst(seed);
      if (e > worst) worst = e, worst_name = c.name;
    }
  }
  const double t = seconds_since(start);
  report(1, worst <= 1e-4 && t < 60.0,
         fmt("max relative error %.3g (%s) over 9 cases x 10 seeds, %.1f s", worst, worst_name.c_str(), t));
}

// ---------------------------------------------------------------------------
// 2. DBSCAN

void criterion_dbscan() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> blob_center(0.0, 30.0), spread(0.2, 1.5), eps_d(0.5, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int mismatches = 0;
  double clustering_time = 0.0;
  const auto start = Clock::now();
  for (int inst = 0; inst < 100; ++inst) {
    // a few Gaussian blobs plus uniform background, so core, border and noise all occur
    std::vector<Vec2> pts;
    const int blobs = 2 + static_cast<int>(rng() % 5);
    std::vector<std::pair<Vec2, double>> centers;
    for (int b = 0; b < blobs; ++b) centers.push_back({{blob_center(rng), blob_center(rng) * 0.3}, spread(rng)});
    while (pts.size() < 200) {
      if (rng() % 5 == 0) {
        pts.push_back({blob_center(rng), blob_center(rng) * 0.3});
      } else {
        const auto& [c, s] = centers[rng() % centers.size()];
        pts.push_back({c.x + s * gauss(rng), c.y + s * gauss(rng)});
      }
    }
    const DbscanConfig cfg{eps_d(rng), 3 + rng() % 5};
    const auto t = Clock::now();
    const auto got = dbscan(pts, cfg);
    clustering_time += seconds_since(t);
    const auto want = oracle::brute_force_dbscan(pts, cfg.eps, cfg.min_pts);
    mismatches += oracle::canonical(got.clusters) != oracle::canonical(want.clusters) || got.noise != want.noise;
  }
  const double total = seconds_since(start);
  report(2, mismatches == 0 && total < 10.0,
         fmt("%d of 100 instances differ from the brute-force partition; %.2f s total (%.3f s in dbscan)",
             mismatches, total, clustering_time));
}

// ---------------------------------------------------------------------------
// 3. Geometry

bool blocked(Vec2 obj, Vec2 tx, Vec2 rx, double omega) {
  return blockage_from_location({0, obj.x, obj.y, true}, {tx, rx, omega, 1.0});
}

void criterion_geometry() {
  std::mt19937_64 rng(31);
  int disagreements = 0, banded = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto c = oracle::random_link_case(rng);
    const auto d = oracle::dense_los_oracle(c.tx, c.rx, c.obj, c.omega);
    if (d.near_boundary) {
      ++banded;
      continue;
    }
    disagreements += blocked(c.obj, c.tx, c.rx, c.omega) != d.blocked;
  }
  std::uniform_real_distribution<double> shift(-50.0, 50.0), grow(0.0, 3.0);
  int sym = 0, trans = 0, swap = 0, mono = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto c = oracle::random_link_case(rng);
    const bool b = blocked(c.obj, c.tx, c.rx, c.omega);
    auto mirror = [](Vec2 p) { return Vec2{-p.x, p.y}; };
    sym += blocked(mirror(c.obj), mirror(c.tx), mirror(c.rx), c.omega) != b;
    const Vec2 d{shift(rng), shift(rng)};
    trans += blocked(c.obj + d, c.tx + d, c.rx + d, c.omega) != b;
    swap += blocked(c.obj, c.rx, c.tx, c.omega) != b;
    mono += b && !blocked(c.obj, c.tx, c.rx, c.omega + grow(rng));
  }
  report(3, disagreements == 0 && sym + trans + swap + mono == 0,
         fmt("oracle disagreements %d (%d of 1000 in tolerance band); property violations: symmetry %d, "
             "translation %d, Tx/Rx swap %d, width monotonicity %d",
             disagreements, banded, sym, trans, swap, mono));
}

// ---------------------------------------------------------------------------
// 4. Loss values

void criterion_losses() {
  double worst = 0.0;
  auto near = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
  auto h = nn::huber_loss(nn::Vector{0.0}, nn::Vector{0.0});
  near(h.loss, 0.0);
  near(h.grad[0], 0.0);
  near(nn::huber_loss(nn::Vector{0.5}, nn::Vector{0.0}, 1.0).loss, 0.125);
  h = nn::huber_loss(nn::Vector{2.0}, nn::Vector{0.0}, 1.0);
  near(h.loss, 1.5);
  near(h.grad[0], 1.0);
  near(nn::bce_loss(nn::Vector{0.5}, nn::Vector{1.0}).loss, std::log(2.0));
  const double clamped = nn::bce_loss(nn::Vector{1.0, 0.0}, nn::Vector{1.0, 0.0}).loss;
  const double jump = std::abs(nn::huber_loss(nn::Vector{1.0 - 1e-9}, nn::Vector{0.0}).loss -
                               nn::huber_loss(nn::Vector{1.0 + 1e-9}, nn::Vector{0.0}).loss);
  report(4, worst <= 1e-12 && clamped <= 1e-6 && jump <= 1e-8,
         fmt("max deviation from analytic values %.3g; exact-target BCE %.3g; Huber jump at |z|=delta %.3g",
             worst, clamped, jump));
}

// ---------------------------------------------------------------------------
// 5, 6, 8. Trained pipeline over five training seeds

const std::vector<Vec2> kMovedRx{{-4.0, 10.0}, {-2.0, 10.0}, {2.0, 10.0}, {4.0, 10.0}, {3.0, 9.0}};

struct SeedRun {
  double proposed = 0.0, rf = 0.0, rf_lidar = 0.0;  // held-out accuracy vs RSSI-derived labels
  std::vector<double> proposed_per_step;
  // geometric-truth accuracy at the original receiver, then at each moved receiver
  double zs_original = 0.0;
  std::vector<double> zs_proposed, zs_rf, zs_rf_lidar;
};

std::vector<bool> threshold(const nn::Vector& p) {
  std::vector<bool> b;
  for (double x : p) b.push_back(x > 0.5);
  return b;
}

SeedRun run_seed(const DatasetFile& d, const std::vector<ScenarioBundle>& bundles, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.seed = seed;
  const auto loc = train_localization(d, cfg);
  const auto rf = train_blockage(d, cfg, BlockageVariant::rf_only);
  const auto rl = train_blockage(d, cfg, BlockageVariant::rf_lidar);

  const LinkGeometry link{d.meta.tx, d.meta.rx, 4.0, d.meta.r0};
  const auto test = d.indices(Split::test);
  std::vector<std::vector<bool>> truth, p_loc, p_rf, p_rl;
  for (auto i : test) {
    const auto& s = d.samples[i];
    truth.emplace_back(s.future_blocked.begin(), s.future_blocked.end());
    p_loc.push_back(predict_blockage_sequence(loc.model, s.window, link));
    p_rf.push_back(threshold(blockage_probabilities(rf.model, s)));
    p_rl.push_back(threshold(blockage_probabilities(rl.model, s)));
  }
  SeedRun r;
  const auto e = evaluate_blockage(p_loc, truth);
  r.proposed = e.aggregate.accuracy();
  for (const auto& c : e.per_step) r.proposed_per_step.push_back(c.accuracy());
  r.rf = evaluate_blockage(p_rf, truth).aggregate.accuracy();
  r.rf_lidar = evaluate_blockage(p_rl, truth).aggregate.accuracy();

  auto world_of = [&](const std::string& name) -> const WorldState& {
    for (const auto& b : bundles)
      if (b.name == name) return b.config->world;
    throw Error(ErrorKind::invalid_argument, "unknown scenario " + name);
  };
  auto geometric_truth = [&](const LinkGeometry& l) {
    std::vector<std::vector<bool>> t;
    for (auto i : test) t.push_back(occlusion_sequence(world_of(d.samples[i].scenario), l, d.samples[i].t, d.meta.horizon));
    return t;
  };
  r.zs_original = evaluate_blockage(p_loc, geometric_truth(link)).aggregate.accuracy();
  for (const auto& rx : kMovedRx) {
    const auto moved = transfer_link(link, rx);
    const auto t = geometric_truth(moved);
    std::vector<std::vector<bool>> p;
    for (auto i : test) p.push_back(predict_blockage_sequence(loc.model, d.samples[i].window, moved));
    r.zs_proposed.push_back(evaluate_blockage(p, t).aggregate.accuracy());
    // baselines are not retrained: their predictions stay those made for the original link
    r.zs_rf.push_back(evaluate_blockage(p_rf, t).aggregate.accuracy());
    r.zs_rf_lidar.push_back(evaluate_blockage(p_rl, t).aggregate.accuracy());
  }
  return r;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void criteria_pipeline() {
  const auto start = Clock::now();
  const auto& bundles = fixture::cached_bundles();
  const auto& d = fixture::standard_dataset();
  std::vector<SeedRun> runs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    runs.push_back(run_seed(d, bundles, seed));
    const auto& r = runs.back();
    std::printf("  training seed %llu: proposed %.4f  rf %.4f  rf+lidar %.4f\n",
                static_cast<unsigned long long>(seed), r.proposed, r.rf, r.rf_lidar);
  }
  const double elapsed = seconds_since(start);

  auto collect = [&](auto field) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.*field);
    return v;
  };
  const double m_loc = mean(collect(&SeedRun::proposed));
  const double m_rf = mean(collect(&SeedRun::rf));
  const double m_rl = mean(collect(&SeedRun::rf_lidar));
  report(5, m_loc >= 0.70 && m_rf >= 0.85 && m_rl >= 0.85 && m_rl >= m_rf && m_rf >= m_loc && elapsed < 300.0,
         fmt("mean held-out accuracy over 5 training seeds (%zu test windows, 6 scenarios): proposed %.4f, "
             "rf %.4f, rf+lidar %.4f; simulate+label+train+eval %.1f s",
             d.indices(Split::test).size(), m_loc, m_rf, m_rl, elapsed));

  // 6: mean over seeds per position
  const double orig = mean(collect(&SeedRun::zs_original));
  double worst_gap = 0.0;
  int baseline_below = 0;
  std::string detail = fmt("original %.4f;", orig);
  for (std::size_t k = 0; k < kMovedRx.size(); ++k) {
    std::vector<double> p, a, b;
    for (const auto& r : runs) {
      p.push_back(r.zs_proposed[k]);
      a.push_back(r.zs_rf[k]);
      b.push_back(r.zs_rf_lidar[k]);
    }
    const double mp = mean(p), ma = mean(a), mb = mean(b);
    worst_gap = std::max(worst_gap, std::abs(mp - orig));
    baseline_below += ma < mp && mb < mp;
    detail += fmt(" rx(%g,%g) proposed %.4f rf %.4f rf+lidar %.4f;", kMovedRx[k].x, kMovedRx[k].y, mp, ma, mb);
  }
  report(6, worst_gap <= 0.15 && baseline_below >= 3,
         fmt("largest shift from original %.1f points; both baselines below proposed at %d of 5 positions. ",
             100.0 * worst_gap, baseline_below) + detail);

  // 8: per-horizon spread across seeds
  std::vector<std::vector<double>> per_step;
  for (const auto& r : runs) per_step.push_back(r.proposed_per_step);
  const auto s = multi_seed_report(per_step);
  std::string steps;
  for (std::size_t h = 0; h < s.stddev.size(); ++h) steps += fmt(" h%zu=%.4f", h + 1, s.stddev[h]);
  const bool pass8 = s.stddev.back() <= 2.0 * s.stddev.front();
  const std::string detail8 = fmt("proposed per-horizon accuracy stddev over 5 seeds:%s", steps.c_str());
  deferred.push_back([=] { report(8, pass8, detail8); });
}

// ---------------------------------------------------------------------------
// 7. Replay determinism

void criterion_replay() {
  TempDir dir("acceptance_replay");
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  text::write_file(p("run.ini"), "[train]\nepisodes = 2\niterations = 20\n");
  std::vector<std::vector<std::string>> steps{
      {"simulate", "--out", p("s1"), "--seed", "1"},
      {"simulate", "--out", p("s2"), "--seed", "2"},
      {"label", "--out", p("data"), "--scenario", p("s1"), "--scenario", p("s2")},
      {"train", "--config", p("run.ini"), "--out", p("loc"), "--dataset", p("data"), "--variant", "localization"},
      {"train", "--config", p("run.ini"), "--out", p("rf"), "--dataset", p("data"), "--variant", "rf"},
      {"train", "--config", p("run.ini"), "--out", p("rfl"), "--dataset", p("data"), "--variant", "rf_lidar"},
      {"predict", "--out", p("pred"), "--dataset", p("data"), "--checkpoint", p("loc/model.json")},
      {"evaluate", "--out", p("eval"), "--dataset", p("data"), "--checkpoint", p("loc/model.json"),
       "--checkpoint", p("rf/model.json"), "--checkpoint", p("rfl/model.json")},
      {"transfer", "--out", p("xfer"), "--dataset", p("data"), "--checkpoint", p("loc/model.json"), "--checkpoint",
       p("rf/model.json"), "--scenario", p("s1"), "--scenario", p("s2"), "--rx-list", "2 10", "--rx-list", "-4 10"}};
  int chain_failures = 0;
  std::vector<std::string> run_dirs;
  for (const auto& s : steps) {
    chain_failures += cli::run(s) != 0;
    run_dirs.push_back(*(std::find(s.begin(), s.end(), "--out") + 1));
  }
  int identical = 0, files = 0;
  for (const auto& r : run_dirs) {
    const auto manifest = fs::path(r) / kManifestName;
    if (!fs::exists(manifest)) continue;
    const auto recorded = parse_manifest(text::read_file(manifest.string()));
    files += static_cast<int>(recorded.outputs.size());
    const bool same = cli::run({"replay", manifest.string(), "--out", r + "_replay"}) == 0;
    if (!same) std::printf("  replay of %s did not reproduce its outputs\n", r.c_str());
    identical += same;
  }
  report(7, chain_failures == 0 && identical == static_cast<int>(run_dirs.size()) && files > 0,
         fmt("%d of %zu manifests replayed byte-identically (%d output files); %d chain steps failed", identical,
             run_dirs.size(), files, chain_failures));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  auto guarded = [](std::vector<int> ids, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      for (int id : ids) report(id, false, std::string("threw: ") + e.what());
    }
  };
  guarded({1}, criterion_gradients);
  guarded({2}, criterion_dbscan);
  guarded({3}, criterion_geometry);
  guarded({4}, criterion_losses);
  guarded({5, 6, 8}, criteria_pipeline);
  guarded({7}, criterion_replay);
  for (const auto& f : deferred) f();
  std::printf("%d criteria failed; %.1f s\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
