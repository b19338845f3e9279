#pragma once

#include <string>

#include "gm3/models.hpp"
#include "gm3/state.hpp"

namespace gm3 {

// Driver intents, model-agnostic. Positive steering turns toward +y (right).
struct ControlCommand {
  double steering = 0.0;  // [-1, 1]
  double speed = 0.0;     // [-1, 1]
  double brake = 0.0;     // [0, 1]
  double timestamp = 0.0;

  ControlCommand saturated() const;
  friend bool operator==(const ControlCommand&, const ControlCommand&) = default;
};

struct ControlLimits {
  double max_steer = 0.4;        // rad
  double max_steer_rate = 1.0;   // rad/s
  double max_wheel_speed = 30.0; // rad/s
  double max_accel = 2.0;        // m/s^2
  double max_decel = 4.0;        // m/s^2
  // Converts accel/decel limits into wheel-speed slew rates for GM3.
  double wheel_radius = 0.3;     // m
  // Lean angle per radian of geometric steer for models driven by lean
  // (GM3 skateboards).
  double lean_per_steer = 1.0;

  void validate() const;
};

// Maps saturated intents to the model's native command. Steering slews
// toward intent * max_steer at no more than max_steer_rate. Wheel speed
// (GM3) slews toward speed * max_wheel_speed * (1 - brake) at
// max_accel / wheel_radius when speeding up and max_decel / wheel_radius
// when slowing down. Acceleration (KBM) is speed * max_accel, or
// -brake * max_decel while braking.
ModelCommand map_controls(const ControlCommand& intents, const ControlLimits& limits,
                          const DynamicsModel& model, const VehicleSpec& spec,
                          const ModelCommand& prev_mapped, double dt);
ModelCommand map_controls(const ControlCommand& intents, const ControlLimits& limits,
                          const std::string& model_id, const VehicleSpec& spec,
                          const ModelCommand& prev_mapped, double dt);

// Zero command in the model's native longitudinal variant.
ModelCommand neutral_command(const DynamicsModel& model);

// Geometric steer angle represented by a mapped command.
double mapped_steer(const ModelCommand& cmd, const ControlLimits& limits,
                    const DynamicsModel& model, const VehicleSpec& spec);

}  // namespace gm3
