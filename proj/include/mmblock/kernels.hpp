#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a `_serial` twin with identical
// per-element arithmetic; the tests require bit-identical results from both.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmblock/scene.hpp"
#include "mmblock/types.hpp"

namespace mmblock::kernels {

/// One ray every 2*pi/rays radians from angle 0. A ray yields a point at its nearest
/// hit when that hit lies in (0, max_range]; rays without such a hit yield nothing.
std::vector<LidarPoint> raycast(Vec2 origin, std::span<const Segment> segments, int rays,
                                double max_range);
std::vector<LidarPoint> raycast_serial(Vec2 origin, std::span<const Segment> segments, int rays,
                                       double max_range);

/// Distance along a unit ray to a segment, or a negative value when it misses.
double ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& seg);

/// For every point, the ascending indices of all points within eps (inclusive, itself included).
std::vector<std::vector<std::uint32_t>> neighbor_lists(std::span<const Vec2> points, double eps);
std::vector<std::vector<std::uint32_t>> neighbor_lists_serial(std::span<const Vec2> points,
                                                              double eps);

/// y = W x + b for row-major W (rows x cols).
void affine(std::span<const double> w, std::span<const double> b, std::span<const double> x,
            std::span<double> y);
void affine_serial(std::span<const double> w, std::span<const double> b,
                   std::span<const double> x, std::span<double> y);

/// Runs body(i) for i in [0, n). Iterations must write disjoint state.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

template <class Body>
void serial_for(std::size_t n, Body&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace mmblock::kernels
