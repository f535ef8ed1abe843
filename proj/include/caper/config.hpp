#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "caper/harness.hpp"

namespace caper {

// Flat "key = value" settings. Dotted keys group related options
// (refine.iterations, base.gamma, ...). '#' starts a comment line.
using Settings = std::map<std::string, std::string>;

Settings parse_settings(std::istream& in, const std::string& source = "<stream>");
Settings load_settings(const std::string& path);

// Every recognised key, in the order the CLI lists them.
const std::vector<std::string_view>& settings_keys();

/// Applies recognised keys onto cfg. Throws ConfigError naming the key for an
/// unknown key or an unparseable value.
void apply_settings(const Settings& settings, ExperimentConfig& cfg);

}  // namespace caper
