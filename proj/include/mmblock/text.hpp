#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mmblock/types.hpp"

namespace mmblock::text {

/// Shortest representation that parses back to the identical double.
std::string format_double(double v);

/// Strict whole-field parse; false on malformed input or trailing characters.
bool parse_double(std::string_view field, double& out);
bool parse_long(std::string_view field, long& out);

/// Throws parse_error naming `what` on failure.
double to_double(std::string_view field, std::string_view what);
long to_long(std::string_view field, std::string_view what);
Vec2 to_vec2(std::string_view field, std::string_view what);
std::vector<double> to_doubles(std::string_view field, std::string_view what);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_ws(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace mmblock::text
