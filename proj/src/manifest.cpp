#include "mmblock/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <json.hpp>
#include <memory>

#include "mmblock/text.hpp"
#include "mmblock/types.hpp"

namespace mmblock {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    throw Error(ErrorKind::io_error, "sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const fs::path& file) { return sha256_hex(text::read_file(file.string())); }

namespace {

json digests_json(const std::vector<FileDigest>& v) {
  json a = json::array();
  for (const auto& d : v) a.push_back({{"path", d.path}, {"sha256", d.sha256}});
  return a;
}

std::vector<FileDigest> digests_from(const json& a) {
  std::vector<FileDigest> out;
  for (const auto& d : a) out.push_back({d.at("path").get<std::string>(), d.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

std::string manifest_json(const RunManifest& m) {
  json j;
  j["version"] = m.version;
  j["subcommand"] = m.subcommand;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["inputs"] = digests_json(m.inputs);
  j["outputs"] = digests_json(m.outputs);
  j["output_dir"] = m.output_dir;
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
  try {
    const auto j = json::parse(text);
    RunManifest m;
    m.version = j.at("version").get<int>();
    if (m.version != 1)
      throw Error(ErrorKind::version_mismatch, "manifest version " + std::to_string(m.version));
    m.subcommand = j.at("subcommand").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.inputs = digests_from(j.at("inputs"));
    m.outputs = digests_from(j.at("outputs"));
    m.output_dir = j.at("output_dir").get<std::string>();
    m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema_mismatch, std::string("malformed manifest: ") + e.what());
  }
}

std::vector<FileDigest> digest_directory(const fs::path& dir) {
  std::vector<FileDigest> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir).generic_string();
    if (rel == kManifestName) continue;
    out.push_back({rel, sha256_file(entry.path())});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  return out;
}

std::vector<FileDigest> digest_input(const fs::path& path) {
  if (fs::is_directory(path)) {
    auto out = digest_directory(path);
    for (auto& d : out) d.path = (path / d.path).generic_string();
    return out;
  }
  if (!fs::exists(path)) throw Error(ErrorKind::io_error, path.string() + ": no such file");
  return {{path.generic_string(), sha256_file(path)}};
}

}  // namespace mmblock
