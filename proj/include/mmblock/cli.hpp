#pragma once

#include <string>
#include <vector>

namespace mmblock::cli {

/// Runs one subcommand. `args` excludes the program name.
/// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int run(const std::vector<std::string>& args);

/// Environment variable naming the default config file.
constexpr const char* kConfigEnv = "MMBLOCK_CONFIG";

}  // namespace mmblock::cli
