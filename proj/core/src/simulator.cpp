#include "gm3/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gm3/config.hpp"
#include "gm3/errors.hpp"

namespace gm3 {

void ControlScript::validate() const {
  if (timeline.empty()) {
    if (!duration) throw ConfigError("script needs a timeline or a duration");
  } else {
    if (timeline.front().time != 0.0) throw ConfigError("script timeline must start at t = 0");
    for (std::size_t i = 1; i < timeline.size(); ++i) {
      if (!(timeline[i].time > timeline[i - 1].time)) {
        throw ConfigError("script timeline times must be strictly increasing (entry " +
                          std::to_string(i) + ")");
      }
    }
  }
  if (duration && !(*duration >= 0.0)) throw ConfigError("script duration must be non-negative");
  if (!initial_state.finite()) throw ConfigError("script initial state must be finite");
}

double ControlScript::end_time() const {
  if (duration) return *duration;
  return timeline.empty() ? 0.0 : timeline.back().time;
}

ControlCommand ControlScript::command_at(double t) const {
  ControlCommand out;
  constexpr double kSlack = 1.0e-9;
  auto it = std::upper_bound(timeline.begin(), timeline.end(), t + kSlack,
                             [](double v, const TimedCommand& c) { return v < c.time; });
  if (it != timeline.begin()) out = std::prev(it)->command;
  out.timestamp = t;
  return out;
}

std::size_t RunLog::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("run log has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

bool RunLog::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<double> RunLog::column(const std::string& name) const {
  const auto idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

const std::vector<std::string>& common_log_columns() {
  static const std::vector<std::string> cols{
      "t",        "x",          "y",           "heading",      "vx",
      "vy",       "yaw_rate",   "lean",        "cg_x",         "cg_y",
      "steer_intent", "speed_intent", "brake_intent", "cmd_steer", "cmd_longitudinal",
      "cmd_brake", "status"};
  return cols;
}

Simulator::Simulator(VehicleConfig config, std::shared_ptr<const DynamicsModel> model,
                     VehicleState initial_state)
    : config_(std::move(config)),
      model_(std::move(model)),
      initial_(std::move(initial_state)),
      state_(initial_) {
  if (!model_) throw UnknownModelError("null model");
  config_.spec.validate();
  config_.limits.validate();
  if (!(config_.dt > 0.0)) throw ConfigError("integrator dt must be positive");
  if (!initial_.finite()) throw ConfigError("initial state must be finite");
  initial_.heading = normalize_angle(initial_.heading);
  state_ = initial_;
  mapped_ = neutral_command(*model_);

  log_.columns = common_log_columns();
  for (auto& c : model_->extra_columns(config_.spec)) log_.columns.push_back(std::move(c));
  log_.metadata.model_id = model_->id();
  log_.metadata.vehicle = config_.spec.name;
  log_.metadata.spec_hash = spec_hash(config_.spec);
  log_.metadata.dt = config_.dt;
  append_row(0);
}

Simulator::Simulator(VehicleConfig config, const std::string& model_id,
                     VehicleState initial_state)
    : Simulator(std::move(config), ModelRegistry::instance().get(model_id),
                std::move(initial_state)) {}

std::vector<double> Simulator::extra_values() const {
  return model_->extra_values(config_.spec, state_, mapped_);
}

void Simulator::append_row(int status) {
  const auto cg = cg_position();
  std::vector<double> row{time(),          state_.x,         state_.y,
                          state_.heading,  state_.vx,        state_.vy,
                          state_.yaw_rate, state_.lean,      cg.x,
                          cg.y,            intents_.steering, intents_.speed,
                          intents_.brake,  mapped_.steer_or_lean, mapped_.longitudinal_value(),
                          mapped_.brake,   static_cast<double>(status)};
  auto extra = extra_values();
  row.insert(row.end(), extra.begin(), extra.end());
  log_.rows.push_back(std::move(row));
}

bool Simulator::step(const ControlCommand& intents) {
  if (faulted()) return false;
  intents_ = intents.saturated();
  const auto cmd =
      map_controls(intents_, config_.limits, *model_, config_.spec, mapped_, config_.dt);
  try {
    auto next = model_step(*model_, config_.spec, state_, cmd, config_.dt);
    state_ = std::move(next);
    mapped_ = cmd;
    ++steps_;
    trace_.push_back(cg_position());
    append_row(0);
  } catch (const IntegrationFault& e) {
    mapped_ = cmd;
    ++steps_;
    log_.metadata.error = e.what();
    const auto cg = cg_position();
    std::vector<double> row{time(),          state_.x,          state_.y,
                            state_.heading,  state_.vx,         state_.vy,
                            state_.yaw_rate, state_.lean,       cg.x,
                            cg.y,            intents_.steering, intents_.speed,
                            intents_.brake,  cmd.steer_or_lean, cmd.longitudinal_value(),
                            cmd.brake,       1.0};
    row.resize(log_.columns.size(), std::nan(""));
    log_.rows.push_back(std::move(row));
    return false;
  }
  return true;
}

void Simulator::prime_controls(const ControlCommand& intents) {
  if (steps_ != 0) throw std::logic_error("prime_controls after the first step");
  constexpr double kSettled = 1.0e9;
  intents_ = intents.saturated();
  mapped_ = map_controls(intents_, config_.limits, *model_, config_.spec,
                         neutral_command(*model_), kSettled);
  log_.rows.clear();
  append_row(0);
}

void Simulator::reset_state() {
  state_ = initial_;
  mapped_ = neutral_command(*model_);
  intents_ = ControlCommand{};
}

void Simulator::clear_trace() { trace_.clear(); }

RunLog run_script(const ControlScript& script, const VehicleConfig& config) {
  script.validate();
  Simulator sim(config, script.model_type, script.initial_state);
  if (script.prime_controls) sim.prime_controls(script.command_at(0.0));
  const double end = script.end_time();
  const auto steps = static_cast<std::size_t>(std::ceil(end / config.dt - 1.0e-9));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    if (!sim.step(script.command_at(t))) break;
  }
  return sim.log();
}

}  // namespace gm3
