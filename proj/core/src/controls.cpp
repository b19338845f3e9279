#include "gm3/controls.hpp"

#include <algorithm>
#include <cmath>

#include "gm3/errors.hpp"

namespace gm3 {
namespace {

double slew(double prev, double target, double max_step) {
  return prev + std::clamp(target - prev, -max_step, max_step);
}

double clamp_unit(double v) { return std::isfinite(v) ? std::clamp(v, -1.0, 1.0) : 0.0; }

}  // namespace

ControlCommand ControlCommand::saturated() const {
  ControlCommand c = *this;
  c.steering = clamp_unit(steering);
  c.speed = clamp_unit(speed);
  c.brake = std::isfinite(brake) ? std::clamp(brake, 0.0, 1.0) : 0.0;
  return c;
}

void ControlLimits::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("control limit '") + name + "' must be positive");
    }
  };
  positive(max_steer, "max_steer");
  positive(max_steer_rate, "max_steer_rate");
  positive(max_wheel_speed, "max_wheel_speed");
  positive(max_accel, "max_accel");
  positive(max_decel, "max_decel");
  positive(wheel_radius, "wheel_radius");
  positive(lean_per_steer, "lean_per_steer");
}

ModelCommand neutral_command(const DynamicsModel& model) {
  ModelCommand c;
  if (model.longitudinal_input() == LongitudinalInput::kAcceleration) {
    c.longitudinal = AccelerationCommand{};
  } else {
    c.longitudinal = WheelSpeedCommand{};
  }
  return c;
}

double mapped_steer(const ModelCommand& cmd, const ControlLimits& limits,
                    const DynamicsModel& model, const VehicleSpec& spec) {
  return model.steer_is_lean(spec) ? cmd.steer_or_lean / limits.lean_per_steer
                                   : cmd.steer_or_lean;
}

ModelCommand map_controls(const ControlCommand& raw, const ControlLimits& limits,
                          const DynamicsModel& model, const VehicleSpec& spec,
                          const ModelCommand& prev, double dt) {
  const ControlCommand in = raw.saturated();
  ModelCommand out = neutral_command(model);
  out.brake = in.brake;

  const double prev_steer = mapped_steer(prev, limits, model, spec);
  const double steer =
      slew(prev_steer, in.steering * limits.max_steer, limits.max_steer_rate * dt);
  out.steer_or_lean = model.steer_is_lean(spec) ? steer * limits.lean_per_steer : steer;

  if (model.longitudinal_input() == LongitudinalInput::kWheelSpeed) {
    const auto* p = std::get_if<WheelSpeedCommand>(&prev.longitudinal);
    const double prev_omega = p ? p->omega : 0.0;
    const double target = in.speed * limits.max_wheel_speed * (1.0 - in.brake);
    const bool speeding_up =
        std::abs(target) > std::abs(prev_omega) && target * prev_omega >= 0.0;
    const double rate = (speeding_up ? limits.max_accel : limits.max_decel) / limits.wheel_radius;
    out.longitudinal = WheelSpeedCommand{slew(prev_omega, target, rate * dt)};
  } else {
    const double accel =
        in.brake > 0.0 ? -in.brake * limits.max_decel : in.speed * limits.max_accel;
    out.longitudinal = AccelerationCommand{accel};
  }
  return out;
}

ModelCommand map_controls(const ControlCommand& intents, const ControlLimits& limits,
                          const std::string& model_id, const VehicleSpec& spec,
                          const ModelCommand& prev_mapped, double dt) {
  return map_controls(intents, limits, *ModelRegistry::instance().get(model_id), spec,
                      prev_mapped, dt);
}

}  // namespace gm3
