#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "empcal/config.hpp"

namespace empcal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitExcessiveFailures = 3;

struct RunRequest {
  ScenarioConfig config;
  std::filesystem::path out_dir;
  int threads = 1;
  bool quiet = false;
};

/// Parses `run ...` arguments (without the program name). Resolution order is
/// defaults <- --config JSON file <- explicit flags; the result is validated.
/// Throws empcal::Error(InvalidConfig) with a message naming the key.
RunRequest parse_run_args(const std::vector<std::string>& args);

/// Splits "a,b,c" into reals; throws Error(InvalidConfig) naming `key`.
std::vector<double> parse_real_list(const std::string& key, const std::string& text);

/// Full CLI entry point; returns the process exit code.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace empcal::cli
