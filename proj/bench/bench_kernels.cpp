// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to compare.

#include <benchmark/benchmark.h>

#include <random>

#include "mmblock/config.hpp"
#include "mmblock/kernels.hpp"
#include "mmblock/models.hpp"

using namespace mmblock;

namespace {

std::vector<Segment> standard_segments() {
  const auto cfg = resolve(standard_scenario(1));
  return scene_segments(cfg.world, 40);
}

std::vector<Vec2> random_points(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(0.0, 32.0), y(0.0, 5.5);
  std::vector<Vec2> p(n);
  for (auto& v : p) v = {x(rng), y(rng)};
  return p;
}

template <bool Parallel>
void BM_Raycast(benchmark::State& state) {
  const auto segs = standard_segments();
  const int rays = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto pts = Parallel ? kernels::raycast({0.0, 0.0}, segs, rays, 16.0)
                        : kernels::raycast_serial({0.0, 0.0}, segs, rays, 16.0);
    benchmark::DoNotOptimize(pts);
  }
  state.SetItemsProcessed(state.iterations() * rays);
}

template <bool Parallel>
void BM_NeighborLists(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto n = Parallel ? kernels::neighbor_lists(pts, 2.0) : kernels::neighbor_lists_serial(pts, 2.0);
    benchmark::DoNotOptimize(n);
  }
}

template <bool Parallel>
void BM_Affine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> w(n * n, 0.01), b(n, 0.1), x(n, 1.0), y(n);
  for (auto _ : state) {
    if (Parallel) kernels::affine(w, b, x, y);
    else kernels::affine_serial(w, b, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

// Per-sample localization gradients for one minibatch, as in a training step.
template <bool Parallel>
void BM_BatchGradients(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto model = make_localization_model(64, 5, 1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<nn::Vector>> feats(batch, std::vector<nn::Vector>(8, nn::Vector(64)));
  for (auto& f : feats)
    for (auto& v : f)
      for (auto& x : v) x = u(rng);
  const nn::Vector target(10, 0.5);
  std::vector<RfLocalizationModel> grads(batch, zeros_like(model));
  for (auto _ : state) {
    auto body = [&](std::size_t i) { localization_loss(model, feats[i], target, 1.0, &grads[i]); };
    if (Parallel) kernels::parallel_for(batch, body);
    else kernels::serial_for(batch, body);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(batch));
}

}  // namespace

BENCHMARK(BM_Raycast<false>)->Arg(720)->Arg(2880);
BENCHMARK(BM_Raycast<true>)->Arg(720)->Arg(2880);
BENCHMARK(BM_NeighborLists<false>)->Arg(200)->Arg(1000);
BENCHMARK(BM_NeighborLists<true>)->Arg(200)->Arg(1000);
BENCHMARK(BM_Affine<false>)->Arg(64)->Arg(512);
BENCHMARK(BM_Affine<true>)->Arg(64)->Arg(512);
BENCHMARK(BM_BatchGradients<false>)->Arg(8)->Arg(32);
BENCHMARK(BM_BatchGradients<true>)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
