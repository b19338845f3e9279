#pragma once

#include <cstddef>
#include <vector>

#include "gm3/state.hpp"
#include "gm3/tire_brush.hpp"
#include "gm3/vehicle_spec.hpp"

namespace gm3 {

struct PlanarVector {
  double x = 0.0;
  double y = 0.0;
};

// Body velocities seen at wheel i in that wheel's (steered) frame.
PlanarVector body_to_tire_velocity(const VehicleState& state, const WheelSpec& wheel,
                                   double steer, bool full_kinematics = false);

// Rotates a tire-frame force by the wheel's steer angle into the body frame.
PlanarVector tire_to_body_forces(const TireForces& f, double steer);

struct LoadDistribution {
  std::vector<double> fz;       // per wheel, in wheel-list order [N]
  std::vector<bool> lifted;     // wheel's computed load was negative
  double t_long = 0.0;
  double t_lat = 0.0;
  std::size_t lift_count() const;
};

// Static axle loads plus longitudinal and lateral transfer. roll_moment is
// an additional moment about x (e.g. from the rider) turned into extra
// lateral transfer roll_moment / W on multi-track layouts.
LoadDistribution compute_load_distribution(const VehicleSpec& spec, double ax, double ay,
                                           double roll_moment = 0.0);

// Roll moment contributed by a rider leaning by `lean` under lateral
// acceleration `ay`.
double lean_roll_moment(const VehicleSpec& spec, double lean, double ay);

struct TruckSteer {
  double front = 0.0;
  double rear = 0.0;
};

TruckSteer skateboard_steer(double lean, double kingpin_angle, double lean_gain);

// Steer angle of a wheel at (x, y) when a virtual wheel on the centerline
// of the front axle is steered by `steer` and the turn center lies on the
// rear axle line.
double ackermann_wheel_angle(double steer, double wheel_x, double wheel_y, double rear_axle_x,
                             double axle_distance);

struct WheelControl {
  double steer = 0.0;        // delta_i [rad]
  double wheel_speed = 0.0;  // Omega_i [rad/s], ignored when free rolling
  bool free_rolling = true;
  double normal_load = 0.0;  // F_z,i [N]
  double camber_offset = 0.0;  // added to the tire's static camber [rad]
};

// Per-wheel steer angles for a steer (or, for skateboards, lean) input.
std::vector<double> resolve_steer_angles(const VehicleSpec& spec, double steer_or_lean);

// Per-wheel speed demands for a commanded Omega; differential layouts split
// the demand left/right according to the steer input.
std::vector<double> resolve_wheel_speeds(const VehicleSpec& spec, double omega,
                                         double steer);

struct TireResult {
  TireInputs inputs;
  SlipState slip;
  TireForces tire_frame;
  PlanarVector body;  // tire force rotated into the body frame
  double fz = 0.0;
  double steer = 0.0;
};

struct BodyForces {
  double fx = 0.0;
  double fy = 0.0;
  double mz = 0.0;
  std::vector<TireResult> per_tire;
};

// Runs velocity transform, slip, brush forces and body transform for each
// wheel and sums the body forces and yaw moment in wheel-list order.
BodyForces assemble_body_forces(const VehicleSpec& spec, const VehicleState& state,
                                const std::vector<WheelControl>& controls);

}  // namespace gm3
