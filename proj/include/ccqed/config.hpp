#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccqed/sweep.hpp"

namespace ccqed {

/// Malformed config text or an invalid setting. line = 0 marks a
/// command-line flag.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, int column, const std::string& message);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

struct ConfigEntry {
  std::string key;
  std::string value;
  std::string source;  // file name or "command line"
  int line = 0;
  int key_column = 1;
  int value_column = 1;
};

/// "key = value" lines; blank lines and lines starting with '#' are skipped,
/// as is anything after " #" on a line. Keys are checked against
/// config_keys(); repeated keys are rejected.
std::vector<ConfigEntry> parse_config(std::istream& in, const std::string& source = "config");
std::vector<ConfigEntry> read_config_file(const std::string& path);

/// Every accepted key, in documentation order.
const std::vector<std::string>& config_keys();

/// Value of "n" among the entries, if present (checked).
std::optional<int> config_n(const std::vector<ConfigEntry>& entries);

/// Applies entries in order. The sqrt(N)-scaled keys (sqrtn-g-c,
/// sqrtn-omega, eta-sqrtn) and delta-phi are resolved after all others,
/// against the final N and phi2.
void apply_config(const std::vector<ConfigEntry>& entries, SweepSpec& spec);

}  // namespace ccqed
