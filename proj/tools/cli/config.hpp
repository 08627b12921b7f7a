#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fkp/fkp.h"

namespace fkp::cli {

enum class Command { detect, bench, fixture };

/// Fully validated settings for one invocation.
struct RunConfig {
  Command command = Command::detect;
  fkp_detector detector = FKP_DETECTOR_SFA;
  std::vector<fkp_detector> detectors;  // bench sweep

  std::string input;  // PNM path; empty when a fixture is used
  bool use_fixture = false;
  fkp_fixture_spec fixture{};

  fkp_band band{0.9, 1.0};
  std::uint64_t seed = 0;
  int seeds = 1;    // bench: seed, seed + 1, ...
  int threads = 0;  // bench: 0 = FKP_THREADS or hardware concurrency

  fkp_sfa_params sfa{};
  fkp_surf_params surf{};
  fkp_sift_params sift{};

  std::string out_image;
  std::string out_report;
  std::string out_keypoints;
  std::string out_mask;
  std::string out_csv;
};

/// Bad command line or config file. `key` names the offending flag.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }
  int exit_code() const noexcept { return 2; }

 private:
  std::string key_;
};

/// Raised for --help; the text is the usage message.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// args excludes the program name and starts with the subcommand. Precedence:
/// command-line flags, then keys of the JSON config object, then defaults.
/// Unknown flags or keys, type mismatches and out-of-range values throw ConfigError.
RunConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::string>& config_text = std::nullopt);

/// Value of --config in args, if present.
std::optional<std::string> config_path(const std::vector<std::string>& args);

std::string detector_name(fkp_detector d);

}  // namespace fkp::cli
