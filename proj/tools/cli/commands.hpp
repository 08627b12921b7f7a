#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace fkp::cli {

/// Parameter echo embedded in the report, as a JSON object.
std::string parameters_json(const RunConfig& cfg, fkp_detector detector, std::uint64_t seed);

/// Executes a validated config. 0 on success, 1 on I/O or detector failure.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Whole CLI: parse (exit 2 on bad arguments) then run.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fkp::cli
