#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gm3/simulator.hpp"
#include "gm3/vehicle_spec.hpp"

namespace gm3 {

inline constexpr int kConfigSchemaVersion = 1;

using ParamOverrides = std::map<std::string, std::string>;

// Vehicle config files are YAML documents (see docs/config_schema.md).
// Overrides are dotted paths into the document ("mass_total",
// "wheels.0.mu", "limits.max_steer") whose values are YAML scalars.
VehicleConfig parse_vehicle_config(const std::string& yaml_text,
                                   const ParamOverrides& overrides = {});
VehicleConfig load_vehicle_config(const std::filesystem::path& path,
                                  const ParamOverrides& overrides = {});

ControlScript parse_script(const std::string& yaml_text);
ControlScript load_script(const std::filesystem::path& path);
// Script dt, if the script pins one.
std::optional<double> script_dt(const std::filesystem::path& path);

// Directory holding the shipped vehicle configs: $GM3_CONFIG_DIR if set,
// otherwise the source tree's configs/vehicles.
std::filesystem::path default_config_dir();
// Resolves a vehicle id ("bicycle") or a path to a config file.
std::filesystem::path resolve_vehicle_config(const std::string& id_or_path,
                                             const std::filesystem::path& dir = {});
// Vehicle ids (file stems) available in a config directory, sorted.
std::vector<std::string> list_vehicle_configs(const std::filesystem::path& dir = {});

// Stable 64-bit FNV-1a fingerprint of every field of the spec, hex encoded.
std::string spec_hash(const VehicleSpec& spec);

}  // namespace gm3
