#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mmblock {

struct FileDigest {
  std::string path;    // outputs: relative to the output directory
  std::string sha256;  // lowercase hex

  friend bool operator==(const FileDigest&, const FileDigest&) = default;
};

/// Written as manifest.json next to every run's outputs. `argv` is the exact
/// invocation after the program name; replay substitutes only the output directory.
struct RunManifest {
  int version = 1;
  std::string subcommand;
  std::vector<std::string> argv;
  std::map<std::string, std::string> config;  // fully resolved options
  std::uint64_t seed = 0;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::string output_dir;
  double wall_clock_seconds = 0.0;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& file);

std::string manifest_json(const RunManifest& m);
RunManifest parse_manifest(const std::string& text);

/// Digests of every regular file under `dir` except manifest.json, sorted by path.
std::vector<FileDigest> digest_directory(const std::filesystem::path& dir);

/// Digest of a file, or of every file under a directory (paths kept as given).
std::vector<FileDigest> digest_input(const std::filesystem::path& path);

constexpr const char* kManifestName = "manifest.json";

}  // namespace mmblock
