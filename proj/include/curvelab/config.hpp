#pragma once

#include "curvelab/grid.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace curvelab {

class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;

/// Parses the subset of TOML the run configuration uses: `[section]`
/// headers, `key = value` with dotted keys, double-quoted strings, numbers,
/// booleans, flat numeric arrays and `#` comments. Keys come back fully
/// qualified (`section.key`) in file order.
std::vector<std::pair<std::string, ConfigValue>> parse_config_text(const std::string& text,
                                                                   const std::string& origin = "config");

/// Typed run configuration. Every key has a default; files and overrides may
/// only set known keys, with a value of the default's type.
class Config {
 public:
  Config();

  /// Text of the built-in defaults, with comments.
  static const std::string& defaults_text();

  void merge_text(const std::string& text, const std::string& origin);
  /// Loads a TOML file, or the `config` entry of a run manifest (`.json`).
  void merge_file(const std::string& path);
  /// `key=value` with the value in config syntax (strings may omit quotes).
  void set(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double num(const std::string& key) const;
  int integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& str(const std::string& key) const;
  const std::vector<double>& list(const std::string& key) const;

  void set_value(const std::string& key, ConfigValue v);

  /// Effective configuration as config text, one section per module.
  std::string to_text() const;

 private:
  const ConfigValue& get(const std::string& key) const;
  std::map<std::string, ConfigValue> values_;
};

}  // namespace curvelab
