#pragma once
// Line-oriented key=value configuration with dotted section prefixes,
// resolved as: built-in defaults, then file values, then command-line
// overrides. Unknown keys and out-of-range values are errors that name the
// offending key.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semcom/simulator.hpp"

namespace semcom {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Applies one key=value pair; throws ConfigError for unknown keys or
// unparsable values.
void apply_config_kv(SimConfig& config, const std::string& key,
                     const std::string& value);

// Range validation across the whole config; throws ConfigError.
void validate_config(const SimConfig& config);

// Missing file -> ConfigError. An empty path skips the file layer.
SimConfig load_config(
    const std::optional<std::string>& path,
    const std::vector<std::pair<std::string, std::string>>& overrides);

// Resolved snapshot in a stable key order; values parse back to the same
// configuration (doubles render with round-trip precision).
std::vector<std::pair<std::string, std::string>> echo_config(
    const SimConfig& config);

}  // namespace semcom
