#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "fluxchemo/params.hpp"

namespace fluxchemo {

/// Flat key = value configuration. Lines starting with '#' and blank lines are
/// ignored; trailing "# ..." comments are stripped.
using ConfigMap = std::map<std::string, std::string>;

/// Throws ConfigError on a line without '=', an empty key or a repeated key.
ConfigMap parse_config(const std::string& text);
ConfigMap read_config(const std::string& path);

/// Value of a real key; ConfigError if missing (without fallback) or not a
/// complete decimal number.
double config_real(const ConfigMap& m, const std::string& key);
double config_real(const ConfigMap& m, const std::string& key, double fallback);
std::string config_string(const ConfigMap& m, const std::string& key, const std::string& fallback);

/// Builds Params from a config.
///
/// `units = dimensionless` (default) reads chi or gamma, v0, eps, theta,
/// sigma, M0, L and optionally delta, delta0. `units = physical` reads the
/// PhysicalParams fields and rescales. `regime = skip` disables the regime
/// gate. Keys outside these (and `ignore`) raise ConfigError.
Params params_from_config(const ConfigMap& m, const std::set<std::string>& ignore = {});

/// Dimensionless config text that reads back to the same Params.
std::string params_to_config(const Params& p);

}  // namespace fluxchemo
