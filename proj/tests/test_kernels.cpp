#include <doctest.h>

#include <random>

#include "mmblock/config.hpp"
#include "mmblock/kernels.hpp"
#include "oracles.hpp"

using namespace mmblock;

TEST_CASE("parallel raycast matches the serial reference bit for bit") {
  const auto cfg = resolve(standard_scenario(1));
  for (long t : {0L, 20L, 55L}) {
    const auto segs = scene_segments(cfg.world, t);
    const auto par = kernels::raycast(cfg.world.tx_pos, segs, 720, 16.0);
    const auto ser = kernels::raycast_serial(cfg.world.tx_pos, segs, 720, 16.0);
    CHECK(par == ser);
    CHECK_FALSE(par.empty());
  }
}

TEST_CASE("ray-segment distance") {
  const Segment wall{{-1.0, 3.0}, {1.0, 3.0}};
  CHECK(kernels::ray_segment_distance({0.0, 0.0}, {0.0, 1.0}, wall) == doctest::Approx(3.0));
  CHECK(kernels::ray_segment_distance({0.0, 0.0}, {0.0, -1.0}, wall) < 0.0);
  CHECK(kernels::ray_segment_distance({0.0, 0.0}, {1.0, 0.0}, wall) < 0.0);
}

TEST_CASE("neighbor lists agree with all-pairs distances") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<Vec2> pts(300);
  for (auto& p : pts) p = {u(rng), u(rng)};
  const auto par = kernels::neighbor_lists(pts, 1.0);
  const auto ser = kernels::neighbor_lists_serial(pts, 1.0);
  CHECK(par == ser);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<std::uint32_t> expect;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (norm(pts[i] - pts[j]) <= 1.0) expect.push_back(static_cast<std::uint32_t>(j));
    CHECK(par[i] == expect);
  }
}

TEST_CASE("parallel affine matches serial") {
  std::mt19937_64 rng(3);
  const std::size_t rows = 37, cols = 53;
  const auto w = oracle::random_vector(rows * cols, rng);
  const auto b = oracle::random_vector(rows, rng);
  const auto x = oracle::random_vector(cols, rng);
  std::vector<double> y1(rows), y2(rows);
  kernels::affine(w, b, x, y1);
  kernels::affine_serial(w, b, x, y2);
  CHECK(y1 == y2);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = b[r];
    for (std::size_t c = 0; c < cols; ++c) s += w[r * cols + c] * x[c];
    CHECK(y1[r] == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  kernels::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}
