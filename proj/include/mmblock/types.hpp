#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mmblock {

/// Category of a domain failure. The CLI maps every kind except `usage` to exit code 1.
enum class ErrorKind {
  invalid_argument,
  parse_error,
  schema_mismatch,
  time_index_gap,
  version_mismatch,
  shape_mismatch,
  non_finite,
  length_mismatch,
  invalid_ratio,
  empty_split,
  config_mismatch,
  degenerate_link,
  too_few_seeds,
  io_error,
  usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Axis-aligned rectangle, closed on all sides.
struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  Vec2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Object location. Simulator ground truth is transmitter-local; labels produced by
/// preprocess are in the road frame (transmitter-local shifted so the road region's
/// lower-left corner is the origin, making every valid coordinate nonnegative).
struct Centroid {
  long t = 0;
  double x = 0.0;
  double y = 0.0;
  bool valid = false;

  friend bool operator==(const Centroid&, const Centroid&) = default;
};

struct BlockageLabel {
  long t = 0;
  bool blocked = false;

  friend bool operator==(const BlockageLabel&, const BlockageLabel&) = default;
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace mmblock
