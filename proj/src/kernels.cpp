#include "mmblock/kernels.hpp"

#include <cmath>
#include <limits>

namespace mmblock::kernels {

double ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& seg) {
  const Vec2 e = seg.b - seg.a;
  const double denom = cross(dir, e);
  if (denom == 0.0) return -1.0;
  const Vec2 ao = seg.a - origin;
  const double s = cross(ao, e) / denom;
  const double u = cross(ao, dir) / denom;
  if (s <= 0.0 || u < 0.0 || u > 1.0) return -1.0;
  return s;
}

namespace {

bool cast_one(Vec2 origin, std::span<const Segment> segments, int rays, double max_range, int k,
              LidarPoint& out) {
  const double angle = kTwoPi * static_cast<double>(k) / static_cast<double>(rays);
  const Vec2 dir{std::cos(angle), std::sin(angle)};
  double best = std::numeric_limits<double>::infinity();
  for (const auto& seg : segments) {
    const double s = ray_segment_distance(origin, dir, seg);
    if (s > 0.0 && s < best) best = s;
  }
  if (!(best <= max_range)) return false;
  out = {angle, best};
  return true;
}

std::vector<LidarPoint> compact(const std::vector<LidarPoint>& hits, const std::vector<char>& hit) {
  std::vector<LidarPoint> points;
  for (std::size_t k = 0; k < hits.size(); ++k)
    if (hit[k]) points.push_back(hits[k]);
  return points;
}

}  // namespace

std::vector<LidarPoint> raycast(Vec2 origin, std::span<const Segment> segments, int rays,
                                double max_range) {
  std::vector<LidarPoint> hits(static_cast<std::size_t>(rays));
  std::vector<char> hit(hits.size(), 0);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < rays; ++k)
    hit[static_cast<std::size_t>(k)] =
        cast_one(origin, segments, rays, max_range, k, hits[static_cast<std::size_t>(k)]);
  return compact(hits, hit);
}

std::vector<LidarPoint> raycast_serial(Vec2 origin, std::span<const Segment> segments, int rays,
                                       double max_range) {
  std::vector<LidarPoint> hits(static_cast<std::size_t>(rays));
  std::vector<char> hit(hits.size(), 0);
  for (int k = 0; k < rays; ++k)
    hit[static_cast<std::size_t>(k)] =
        cast_one(origin, segments, rays, max_range, k, hits[static_cast<std::size_t>(k)]);
  return compact(hits, hit);
}

namespace {

std::vector<std::uint32_t> neighbors_of(std::span<const Vec2> points, std::size_t i, double eps2) {
  std::vector<std::uint32_t> out;
  const Vec2 p = points[i];
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double dx = points[j].x - p.x;
    const double dy = points[j].y - p.y;
    if (dx * dx + dy * dy <= eps2) out.push_back(static_cast<std::uint32_t>(j));
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> neighbor_lists(std::span<const Vec2> points, double eps) {
  std::vector<std::vector<std::uint32_t>> lists(points.size());
  const double eps2 = eps * eps;
  const long n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i)
    lists[static_cast<std::size_t>(i)] = neighbors_of(points, static_cast<std::size_t>(i), eps2);
  return lists;
}

std::vector<std::vector<std::uint32_t>> neighbor_lists_serial(std::span<const Vec2> points,
                                                              double eps) {
  std::vector<std::vector<std::uint32_t>> lists(points.size());
  const double eps2 = eps * eps;
  for (std::size_t i = 0; i < points.size(); ++i) lists[i] = neighbors_of(points, i, eps2);
  return lists;
}

void affine(std::span<const double> w, std::span<const double> b, std::span<const double> x,
            std::span<double> y) {
  const std::size_t cols = x.size();
  const long rows = static_cast<long>(y.size());
#pragma omp parallel for schedule(static) if (rows * static_cast<long>(cols) > 65536)
  for (long r = 0; r < rows; ++r) {
    const double* row = w.data() + static_cast<std::size_t>(r) * cols;
    double acc = b[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[static_cast<std::size_t>(r)] = acc;
  }
}

void affine_serial(std::span<const double> w, std::span<const double> b,
                   std::span<const double> x, std::span<double> y) {
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double* row = w.data() + r * cols;
    double acc = b[r];
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

}  // namespace mmblock::kernels
