#pragma once

#include <array>
#include <map>
#include <string>
#include <variant>

namespace gm3 {

// Planar rigid-body state shared by every model. Positions and heading
// are world-frame; velocities and yaw rate are body-frame. Lateral
// quantities follow the x-forward, y-right convention (heading and yaw
// rate positive when turning from +x toward +y).
struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double yaw_rate = 0.0;
  double lean = 0.0;
  // Model-specific scalars carried across steps (e.g. last accelerations).
  std::map<std::string, double> aux;

  static constexpr std::size_t kIntegrated = 7;
  std::array<double, kIntegrated> integrated() const {
    return {x, y, heading, vx, vy, yaw_rate, lean};
  }
  void set_integrated(const std::array<double, kIntegrated>& v);

  double aux_or(const std::string& key, double fallback) const;
  bool finite() const;

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

// Time derivative of the integrated fields of VehicleState.
struct StateDerivative {
  std::array<double, VehicleState::kIntegrated> d{};
  bool finite() const;
};

// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

// Applies s + h * d to the integrated fields, leaving aux untouched.
VehicleState advance(const VehicleState& s, const StateDerivative& d, double h);

struct WheelSpeedCommand {
  double omega = 0.0;  // rad/s
  friend bool operator==(const WheelSpeedCommand&, const WheelSpeedCommand&) = default;
};

struct AccelerationCommand {
  double accel = 0.0;  // m/s^2
  friend bool operator==(const AccelerationCommand&, const AccelerationCommand&) = default;
};

// Model-level input: a steer angle (or a lean angle for skateboards) plus
// the model's native longitudinal input.
struct ModelCommand {
  double steer_or_lean = 0.0;
  std::variant<WheelSpeedCommand, AccelerationCommand> longitudinal{WheelSpeedCommand{}};
  double brake = 0.0;

  double longitudinal_value() const;
  friend bool operator==(const ModelCommand&, const ModelCommand&) = default;
};

}  // namespace gm3
