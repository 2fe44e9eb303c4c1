#pragma once

// Experiment config files: a TOML subset with [mesh], [router], [policy],
// [traffic] and [run] sections of `key = value` lines. Strings may be quoted;
// numbers and true/false are bare; '#' starts a comment.

#include <filesystem>
#include <string>
#include <string_view>

#include "qrasp/engine.hpp"

namespace qrasp {

class ConfigError : public InputError {
 public:
  ConfigError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

// Keys not present keep their SimConfig defaults. The result is validated.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

// Canonical text form; parse_config(format_config(c)) reproduces `c`.
std::string format_config(const SimConfig& cfg);

// "transpose:100000,bit_reversal:100000" -> phases.
std::vector<TrafficPhase> parse_schedule(std::string_view text);

}  // namespace qrasp
