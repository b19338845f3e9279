#include "gm3/vehicle_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gm3/errors.hpp"

namespace gm3 {
namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

PlanarVector body_to_tire_velocity(const VehicleState& state, const WheelSpec& wheel,
                                   double steer, bool full_kinematics) {
  const double u = state.vx - (full_kinematics ? state.yaw_rate * wheel.y : 0.0);
  const double w = state.vy + state.yaw_rate * wheel.x;
  const double c = std::cos(steer);
  const double s = std::sin(steer);
  return {u * c + w * s, -u * s + w * c};
}

PlanarVector tire_to_body_forces(const TireForces& f, double steer) {
  const double c = std::cos(steer);
  const double s = std::sin(steer);
  return {f.fx * c - f.fy * s, f.fx * s + f.fy * c};
}

std::size_t LoadDistribution::lift_count() const {
  return static_cast<std::size_t>(std::count(lifted.begin(), lifted.end(), true));
}

LoadDistribution compute_load_distribution(const VehicleSpec& spec, double ax, double ay,
                                           double roll_moment) {
  const auto axles = axle_geometry(spec);
  const double m = spec.mass_total;
  const double weight = m * kGravity;
  const std::size_t n = spec.wheels.size();

  double front_static = 0.0;
  double rear_static = 0.0;
  LoadDistribution out;
  if (axles.single_axle()) {
    front_static = rear_static = weight / static_cast<double>(n);
  } else {
    const double wb = axles.axle_distance();
    if (!(wb > 0.0)) throw ConfigError(spec.name + ": zero wheelbase on a multi-axle layout");
    front_static = weight * axles.l_rear / (static_cast<double>(axles.n_front) * wb);
    rear_static = weight * axles.l_front / (static_cast<double>(axles.n_rear) * wb);
    out.t_long = m * ax * spec.cg_height / wb;
  }

  const double track = spec.track_width();
  if (track > 0.0) {
    out.t_lat = (m * ay * spec.cg_height + roll_moment) / track;
  }

  out.fz.resize(n);
  out.lifted.resize(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& w = spec.wheels[i];
    double fz = w.x > 0.0
                    ? front_static - (axles.n_front ? out.t_long / axles.n_front : 0.0)
                    : rear_static + (axles.n_rear ? out.t_long / axles.n_rear : 0.0);
    fz -= out.t_lat * sgn(w.y);
    if (fz < 0.0) {
      out.lifted[i] = true;
      fz = 0.0;
    }
    out.fz[i] = fz;
  }
  return out;
}

double lean_roll_moment(const VehicleSpec& spec, double lean, double ay) {
  const double y_cg = spec.rider_cg[1];
  const double h_cg = spec.rider_cg[2];
  const double y_rot = y_cg * std::cos(lean) + h_cg * std::sin(lean);
  const double f_centripetal = spec.mass_rider * ay;
  return y_rot * spec.mass_rider * kGravity + f_centripetal * h_cg;
}

TruckSteer skateboard_steer(double lean, double kingpin_angle, double lean_gain) {
  const double front = lean_gain * lean * std::sin(kingpin_angle);
  return {front, -front};
}

double ackermann_wheel_angle(double steer, double wheel_x, double wheel_y, double rear_axle_x,
                             double axle_distance) {
  const double t = std::tan(steer);
  const double d = wheel_x - rear_axle_x;
  return std::atan2(d * t, axle_distance - wheel_y * t);
}

std::vector<double> resolve_steer_angles(const VehicleSpec& spec, double steer_or_lean) {
  std::vector<double> out(spec.wheels.size(), 0.0);
  switch (spec.steering_mode) {
    case SteeringMode::kSkateboard: {
      const double lean = std::clamp(steer_or_lean, -spec.max_lean, spec.max_lean);
      const auto truck = skateboard_steer(lean, spec.kingpin_angle, spec.lean_gain);
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!spec.wheels[i].steerable) continue;
        out[i] = spec.wheels[i].x > 0.0 ? truck.front : truck.rear;
      }
      break;
    }
    case SteeringMode::kAckermannFront: {
      const auto axles = axle_geometry(spec);
      if (axles.single_axle()) break;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& w = spec.wheels[i];
        if (!w.steerable || !(w.x > 0.0)) continue;
        out[i] = ackermann_wheel_angle(steer_or_lean, w.x, w.y, -axles.l_rear,
                                       axles.axle_distance());
      }
      break;
    }
    case SteeringMode::kSingleTrack:
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (spec.wheels[i].steerable) out[i] = steer_or_lean;
      }
      break;
    case SteeringMode::kDifferential:
      break;
  }
  return out;
}

std::vector<double> resolve_wheel_speeds(const VehicleSpec& spec, double omega, double steer) {
  std::vector<double> out(spec.wheels.size(), omega);
  if (spec.steering_mode != SteeringMode::kDifferential) return out;
  const double ref = spec.differential_reference_length > 0.0
                         ? spec.differential_reference_length
                         : spec.track_width();
  if (!(ref > 0.0)) return out;
  const double t = std::tan(steer);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = omega * (1.0 - t * spec.wheels[i].y / ref);
  }
  return out;
}

BodyForces assemble_body_forces(const VehicleSpec& spec, const VehicleState& state,
                                const std::vector<WheelControl>& controls) {
  if (controls.size() != spec.wheels.size()) {
    throw ConfigError(spec.name + ": expected one wheel control per wheel");
  }
  const auto& guards = spec.slip_guards;
  BodyForces out;
  out.per_tire.reserve(spec.wheels.size());
  for (std::size_t i = 0; i < spec.wheels.size(); ++i) {
    const auto& wheel = spec.wheels[i];
    const auto& ctl = controls[i];
    TireParams params = wheel.tire;
    params.camber += ctl.camber_offset;

    const auto v = body_to_tire_velocity(state, wheel, ctl.steer, spec.full_kinematics);
    TireResult res;
    res.fz = ctl.normal_load;
    res.steer = ctl.steer;
    auto& in = res.inputs;
    in.normal_load = ctl.normal_load;
    in.wheel_speed =
        ctl.free_rolling ? v.x / params.effective_rolling_radius() : ctl.wheel_speed;
    in.steer = ctl.steer;
    in.yaw_rate = state.yaw_rate;
    in.longitudinal_velocity = v.x;
    in.lateral_velocity = v.y;
    in.slip_angle = std::atan2(-v.y, std::max(std::abs(v.x), guards.v_eps));
    const double speed = std::hypot(v.x, v.y);
    in.turn_radius = std::abs(state.yaw_rate) < 1.0e-6
                         ? std::numeric_limits<double>::infinity()
                         : std::max(speed, guards.v_eps) / state.yaw_rate;

    res.slip = compute_slip(in, params, guards, DegeneratePolicy::kClamp);
    res.tire_frame = compute_forces(res.slip, in, params);
    res.body = tire_to_body_forces(res.tire_frame, ctl.steer);
    out.per_tire.push_back(res);
  }
  for (std::size_t i = 0; i < out.per_tire.size(); ++i) {
    const auto& t = out.per_tire[i];
    const auto& w = spec.wheels[i];
    out.fx += t.body.x;
    out.fy += t.body.y;
    out.mz += spec.aligning_gain * t.tire_frame.mz + w.x * t.body.y - w.y * t.body.x;
  }
  return out;
}

}  // namespace gm3
