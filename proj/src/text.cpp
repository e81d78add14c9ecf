#include "mmblock/text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mmblock::text {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc() && res.ptr == field.data() + field.size();
}

bool parse_long(std::string_view field, long& out) {
  field = trim(field);
  if (field.empty()) return false;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc() && res.ptr == field.data() + field.size();
}

double to_double(std::string_view field, std::string_view what) {
  double v = 0.0;
  if (!parse_double(field, v))
    throw Error(ErrorKind::parse_error,
                std::string(what) + ": expected a number, got '" + std::string(field) + "'");
  return v;
}

long to_long(std::string_view field, std::string_view what) {
  long v = 0;
  if (!parse_long(field, v))
    throw Error(ErrorKind::parse_error,
                std::string(what) + ": expected an integer, got '" + std::string(field) + "'");
  return v;
}

std::vector<double> to_doubles(std::string_view field, std::string_view what) {
  std::vector<double> out;
  for (auto tok : split_ws(field)) {
    // accept "x y", "x,y" and "x, y"
    for (auto part : split(tok, ',')) {
      part = trim(part);
      if (!part.empty()) out.push_back(to_double(part, what));
    }
  }
  return out;
}

Vec2 to_vec2(std::string_view field, std::string_view what) {
  const auto v = to_doubles(field, what);
  if (v.size() != 2)
    throw Error(ErrorKind::parse_error,
                std::string(what) + ": expected two numbers, got '" + std::string(field) + "'");
  return {v[0], v[1]};
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + path);
}

}  // namespace mmblock::text
