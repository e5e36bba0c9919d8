#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qvca::cli {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNotConverged = 3, kResourceError = 4 };

struct Options {
  std::string command;
  std::string config;
  std::string out;  // overrides config.output when set
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0 keeps the OpenMP default
  std::string backend;
};

const std::vector<std::string>& commands();

int run(const Options& opt, std::ostream& log);

}  // namespace qvca::cli
