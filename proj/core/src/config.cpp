#include "gm3/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gm3/errors.hpp"

#ifndef GM3_DEFAULT_CONFIG_DIR
#define GM3_DEFAULT_CONFIG_DIR "configs/vehicles"
#endif

namespace gm3 {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML parse error: ") + e.what());
  }
}

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const YAML::Node& node, const char* key, T fallback, const std::string& where) {
  const auto v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

void check_schema_version(const YAML::Node& root, const std::string& where) {
  const int version = get<int>(root, "schema_version", -1, where);
  if (version != kConfigSchemaVersion) {
    throw ConfigError(where + ": unsupported schema_version " + std::to_string(version) +
                      " (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '.') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool is_index(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

void apply_override(YAML::Node root, const std::string& path, const std::string& value) {
  const auto parts = split_path(path);
  YAML::Node node = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const auto& p = parts[i];
    if (is_index(p)) {
      const auto idx = std::stoul(p);
      if (!node.IsSequence() || idx >= node.size()) {
        throw ConfigError("override '" + path + "': index " + p + " out of range");
      }
      node.reset(node[idx]);
    } else {
      if (!node.IsMap()) throw ConfigError("override '" + path + "' does not name a mapping");
      if (!node[p]) node[p] = YAML::Node(YAML::NodeType::Map);
      node.reset(node[p]);
    }
  }
  const auto& leaf = parts.back();
  YAML::Node parsed = load_yaml(value);
  if (is_index(leaf)) {
    const auto idx = std::stoul(leaf);
    if (!node.IsSequence() || idx >= node.size()) {
      throw ConfigError("override '" + path + "': index out of range");
    }
    node[idx] = parsed;
  } else {
    node[leaf] = parsed;
  }
}

TireParams parse_tire(const YAML::Node& n, TireParams base, const std::string& where) {
  base.radius = get(n, "radius", base.radius, where);
  base.half_contact_length = get(n, "half_contact_length", base.half_contact_length, where);
  base.friction = get(n, "mu", base.friction, where);
  base.tread_stiffness = get(n, "cp", base.tread_stiffness, where);
  base.camber = get(n, "camber", base.camber, where);
  base.camber_reduction = get(n, "camber_reduction", base.camber_reduction, where);
  base.rolling_radius = get(n, "rolling_radius", base.rolling_radius, where);
  return base;
}

const std::set<std::string> kTireKeys{"radius", "half_contact_length", "mu", "cp",
                                      "camber", "camber_reduction", "rolling_radius"};

VehicleConfig build_vehicle(const YAML::Node& root) {
  const std::string where = "vehicle config";
  check_keys(root,
             {"schema_version", "name", "mass_total", "mass_rider", "cg_height", "rider_cg",
              "yaw_inertia", "aligning_gain", "steering_mode", "kingpin_angle", "lean_gain",
              "lean_enabled", "max_lean", "full_kinematics", "differential_reference_length",
              "tire_defaults", "wheels", "limits", "integrator", "slip", "notes"},
             where);
  check_schema_version(root, where);

  VehicleConfig cfg;
  auto& s = cfg.spec;
  s.name = get<std::string>(root, "name", "vehicle", where);
  s.mass_total = get(root, "mass_total", s.mass_total, where);
  s.mass_rider = get(root, "mass_rider", s.mass_rider, where);
  s.cg_height = get(root, "cg_height", s.cg_height, where);
  if (const auto r = root["rider_cg"]) {
    check_keys(r, {"x", "y", "h"}, where + ".rider_cg");
    s.rider_cg = {get(r, "x", 0.0, where), get(r, "y", 0.0, where), get(r, "h", 0.0, where)};
  }
  if (root["yaw_inertia"]) s.yaw_inertia = get(root, "yaw_inertia", 0.0, where);
  s.aligning_gain = get(root, "aligning_gain", s.aligning_gain, where);
  s.steering_mode = parse_steering_mode(
      get<std::string>(root, "steering_mode", std::string(to_string(s.steering_mode)), where));
  s.kingpin_angle = get(root, "kingpin_angle", s.kingpin_angle, where);
  s.lean_gain = get(root, "lean_gain", s.lean_gain, where);
  s.lean_enabled = get(root, "lean_enabled", s.lean_enabled, where);
  s.max_lean = get(root, "max_lean", s.max_lean, where);
  s.full_kinematics = get(root, "full_kinematics", s.full_kinematics, where);
  s.differential_reference_length =
      get(root, "differential_reference_length", s.differential_reference_length, where);

  TireParams tire_defaults;
  if (const auto td = root["tire_defaults"]) {
    check_keys(td, kTireKeys, where + ".tire_defaults");
    tire_defaults = parse_tire(td, tire_defaults, where + ".tire_defaults");
  }
  const auto wheels = root["wheels"];
  if (!wheels || !wheels.IsSequence()) throw ConfigError(where + ": 'wheels' must be a list");
  for (std::size_t i = 0; i < wheels.size(); ++i) {
    const auto w = wheels[i];
    const std::string ww = where + ".wheels[" + std::to_string(i) + "]";
    auto keys = kTireKeys;
    keys.insert({"x", "y", "steerable", "driven"});
    check_keys(w, keys, ww);
    if (!w["x"] || !w["y"]) throw ConfigError(ww + ": x and y are required");
    WheelSpec spec_wheel;
    spec_wheel.x = get(w, "x", 0.0, ww);
    spec_wheel.y = get(w, "y", 0.0, ww);
    spec_wheel.steerable = get(w, "steerable", false, ww);
    spec_wheel.driven = get(w, "driven", false, ww);
    spec_wheel.tire = parse_tire(w, tire_defaults, ww);
    s.wheels.push_back(spec_wheel);
  }

  if (const auto g = root["slip"]) {
    check_keys(g, {"v_eps", "standstill_speed", "kappa_eps", "straight_turn_radius",
                   "theta_star_floor"}, where + ".slip");
    auto& sg = s.slip_guards;
    sg.v_eps = get(g, "v_eps", sg.v_eps, where);
    sg.standstill_speed = get(g, "standstill_speed", sg.standstill_speed, where);
    sg.kappa_eps = get(g, "kappa_eps", sg.kappa_eps, where);
    sg.straight_turn_radius = get(g, "straight_turn_radius", sg.straight_turn_radius, where);
    sg.theta_star_floor = get(g, "theta_star_floor", sg.theta_star_floor, where);
  }
  s.validate();

  auto& lim = cfg.limits;
  for (const auto& w : s.wheels) {
    if (w.driven) {
      lim.wheel_radius = w.tire.effective_rolling_radius();
      break;
    }
  }
  if (s.steering_mode == SteeringMode::kSkateboard) {
    const double per = s.lean_gain * std::sin(s.kingpin_angle);
    if (!(per > 0.0)) throw ConfigError(where + ": skateboard needs lean_gain * sin(kingpin) > 0");
    // A two-truck board turns like a bicycle of half its wheelbase.
    lim.lean_per_steer = 1.0 / (2.0 * per);
  }
  if (const auto l = root["limits"]) {
    check_keys(l, {"max_steer", "max_steer_rate", "max_wheel_speed", "max_accel", "max_decel",
                   "lean_per_steer"}, where + ".limits");
    lim.max_steer = get(l, "max_steer", lim.max_steer, where);
    lim.max_steer_rate = get(l, "max_steer_rate", lim.max_steer_rate, where);
    lim.max_wheel_speed = get(l, "max_wheel_speed", lim.max_wheel_speed, where);
    lim.max_accel = get(l, "max_accel", lim.max_accel, where);
    lim.max_decel = get(l, "max_decel", lim.max_decel, where);
    lim.lean_per_steer = get(l, "lean_per_steer", lim.lean_per_steer, where);
  }
  lim.validate();

  if (const auto i = root["integrator"]) {
    check_keys(i, {"dt"}, where + ".integrator");
    cfg.dt = get(i, "dt", cfg.dt, where);
  }
  if (!(cfg.dt > 0.0)) throw ConfigError(where + ": integrator.dt must be positive");
  return cfg;
}

ControlCommand parse_command(const YAML::Node& n, const std::string& where) {
  ControlCommand c;
  c.steering = get(n, "steering", 0.0, where);
  c.speed = get(n, "speed", 0.0, where);
  c.brake = get(n, "brake", 0.0, where);
  return c;
}

}  // namespace

VehicleConfig parse_vehicle_config(const std::string& yaml_text, const ParamOverrides& overrides) {
  YAML::Node root = load_yaml(yaml_text);
  for (const auto& [path, value] : overrides) apply_override(root, path, value);
  return build_vehicle(root);
}

VehicleConfig load_vehicle_config(const std::filesystem::path& path,
                                  const ParamOverrides& overrides) {
  try {
    return parse_vehicle_config(read_file(path), overrides);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ControlScript parse_script(const std::string& yaml_text) {
  const std::string where = "script";
  const YAML::Node root = load_yaml(yaml_text);
  check_keys(root, {"schema_version", "vehicle", "model", "dt", "duration", "initial_state",
                    "param_overrides", "timeline", "prime_controls", "notes"},
             where);
  check_schema_version(root, where);
  ControlScript s;
  s.vehicle_kind = get<std::string>(root, "vehicle", "", where);
  s.model_type = get<std::string>(root, "model", "gm3", where);
  if (root["duration"]) s.duration = get(root, "duration", 0.0, where);
  s.prime_controls = get(root, "prime_controls", false, where);
  if (const auto st = root["initial_state"]) {
    check_keys(st, {"x", "y", "heading", "vx", "vy", "yaw_rate", "lean"}, where + ".initial_state");
    auto& v = s.initial_state;
    v.x = get(st, "x", 0.0, where);
    v.y = get(st, "y", 0.0, where);
    v.heading = get(st, "heading", 0.0, where);
    v.vx = get(st, "vx", 0.0, where);
    v.vy = get(st, "vy", 0.0, where);
    v.yaw_rate = get(st, "yaw_rate", 0.0, where);
    v.lean = get(st, "lean", 0.0, where);
  }
  if (const auto po = root["param_overrides"]) {
    if (!po.IsMap()) throw ConfigError(where + ": param_overrides must be a mapping");
    for (const auto& kv : po) {
      YAML::Emitter e;
      e << kv.second;
      s.param_overrides[kv.first.as<std::string>()] = e.c_str();
    }
  }
  if (const auto tl = root["timeline"]) {
    if (!tl.IsSequence()) throw ConfigError(where + ": timeline must be a list");
    for (std::size_t i = 0; i < tl.size(); ++i) {
      const std::string w = where + ".timeline[" + std::to_string(i) + "]";
      check_keys(tl[i], {"t", "steering", "speed", "brake"}, w);
      if (!tl[i]["t"]) throw ConfigError(w + ": missing 't'");
      s.timeline.push_back({get(tl[i], "t", 0.0, w), parse_command(tl[i], w)});
    }
  }
  s.validate();
  return s;
}

ControlScript load_script(const std::filesystem::path& path) {
  try {
    return parse_script(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::optional<double> script_dt(const std::filesystem::path& path) {
  const auto root = load_yaml(read_file(path));
  if (!root["dt"]) return std::nullopt;
  return get(root, "dt", 0.0, "script");
}

std::filesystem::path default_config_dir() {
  if (const char* env = std::getenv("GM3_CONFIG_DIR"); env && *env) return env;
  return GM3_DEFAULT_CONFIG_DIR;
}

std::filesystem::path resolve_vehicle_config(const std::string& id_or_path,
                                             const std::filesystem::path& dir) {
  const std::filesystem::path direct(id_or_path);
  if (std::filesystem::is_regular_file(direct)) return direct;
  const auto base = dir.empty() ? default_config_dir() : dir;
  for (const char* ext : {".yaml", ".yml"}) {
    auto p = base / (id_or_path + ext);
    if (std::filesystem::is_regular_file(p)) return p;
  }
  throw ConfigError("unknown vehicle config '" + id_or_path + "' (searched " + base.string() + ")");
}

std::vector<std::string> list_vehicle_configs(const std::filesystem::path& dir) {
  const auto base = dir.empty() ? default_config_dir() : dir;
  std::vector<std::string> out;
  if (!std::filesystem::is_directory(base)) return out;
  for (const auto& e : std::filesystem::directory_iterator(base)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".yaml" || ext == ".yml")) {
      out.push_back(e.path().stem().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string spec_hash(const VehicleSpec& s) {
  std::string text;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g;", v);
    text += buf;
  };
  text += s.name + ";";
  num(s.mass_total);
  num(s.mass_rider);
  num(s.cg_height);
  for (double v : s.rider_cg) num(v);
  num(s.yaw_inertia_value());
  num(s.aligning_gain);
  text += std::string(to_string(s.steering_mode)) + ";";
  num(s.kingpin_angle);
  num(s.lean_gain);
  num(s.lean_enabled);
  num(s.max_lean);
  num(s.full_kinematics);
  num(s.differential_reference_length);
  const auto& g = s.slip_guards;
  for (double v : {g.v_eps, g.standstill_speed, g.kappa_eps, g.straight_turn_radius,
                   g.theta_star_floor}) {
    num(v);
  }
  for (const auto& w : s.wheels) {
    for (double v : {w.x, w.y, w.tire.half_contact_length, w.tire.radius, w.tire.camber,
                     w.tire.friction, w.tire.tread_stiffness, w.tire.camber_reduction,
                     w.tire.rolling_radius}) {
      num(v);
    }
    num(w.steerable);
    num(w.driven);
  }
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gm3
