#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gm3/controls.hpp"
#include "gm3/models.hpp"
#include "gm3/state.hpp"
#include "gm3/vehicle_spec.hpp"

namespace gm3 {

inline constexpr double kDefaultDt = 0.005;

// A vehicle ready to simulate: layout, control limits and integrator step.
struct VehicleConfig {
  VehicleSpec spec;
  ControlLimits limits;
  double dt = kDefaultDt;
};

struct TimedCommand {
  double time = 0.0;
  ControlCommand command;
};

struct ControlScript {
  std::string vehicle_kind;
  std::string model_type = "gm3";
  VehicleState initial_state;
  std::map<std::string, std::string> param_overrides;
  std::vector<TimedCommand> timeline;
  std::optional<double> duration;  // defaults to the last timeline time
  // Start with the first command fully slewed (for moving initial states).
  bool prime_controls = false;

  // Throws ConfigError unless timeline times start at 0 and strictly increase.
  void validate() const;
  double end_time() const;
  // Zero-order hold lookup of the command active at time t.
  ControlCommand command_at(double t) const;
};

struct RunLogMetadata {
  std::string model_id;
  std::string vehicle;
  std::string spec_hash;
  double dt = 0.0;
  bool deterministic = true;  // no randomness enters a run
  std::optional<std::string> error;  // integration fault message, if any
};

// Time-aligned records. Row k holds the state at t = k * dt together with
// the intents and mapped command that were applied over the step ending
// there (row 0 holds the initial state and a neutral command).
struct RunLog {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  RunLogMetadata metadata;

  std::size_t column_index(const std::string& name) const;  // throws if absent
  bool has_column(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

// Column names shared by every model, in export order.
const std::vector<std::string>& common_log_columns();

// Single-vehicle fixed-step engine. Not thread-safe; one instance per run.
class Simulator {
public:
  Simulator(VehicleConfig config, std::shared_ptr<const DynamicsModel> model,
            VehicleState initial_state);
  Simulator(VehicleConfig config, const std::string& model_id, VehicleState initial_state);

  // Maps the intents, advances one RK4 step and appends a log row. Returns
  // false (and does nothing) once an integration fault has ended the run.
  bool step(const ControlCommand& intents);

  // Sets the mapped command to the fully slewed value of `intents`, as if
  // they had been held indefinitely. Only valid before the first step.
  void prime_controls(const ControlCommand& intents);

  // Restores the initial state and neutral command; time keeps running.
  void reset_state();
  // Empties the trajectory trace; dynamics are untouched.
  void clear_trace();

  const VehicleState& state() const { return state_; }
  const ModelCommand& mapped_command() const { return mapped_; }
  const ControlCommand& intents() const { return intents_; }
  double time() const { return static_cast<double>(steps_) * config_.dt; }
  std::size_t steps() const { return steps_; }
  bool faulted() const { return log_.metadata.error.has_value(); }
  const std::vector<PlanarVector>& trace() const { return trace_; }
  const RunLog& log() const { return log_; }
  const VehicleConfig& config() const { return config_; }
  const DynamicsModel& model() const { return *model_; }
  const VehicleState& initial_state() const { return initial_; }
  PlanarVector cg_position() const { return model_->cg_position(config_.spec, state_); }
  // Current model-specific diagnostic values (same order as extra columns).
  std::vector<double> extra_values() const;

private:
  void append_row(int status);

  VehicleConfig config_;
  std::shared_ptr<const DynamicsModel> model_;
  VehicleState initial_;
  VehicleState state_;
  ModelCommand mapped_;
  ControlCommand intents_;
  std::size_t steps_ = 0;
  std::vector<PlanarVector> trace_;
  RunLog log_;
};

// Runs a script to its end time with zero-order-hold commands. Integration
// faults truncate the run; the log then carries the error.
RunLog run_script(const ControlScript& script, const VehicleConfig& config);

}  // namespace gm3
