#include "gm3/models.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>
#include <variant>

#include "gm3/errors.hpp"
#include "gm3/rk4.hpp"

namespace gm3 {
namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

StateDerivative rigid_body_derivative(const VehicleSpec& spec, const VehicleState& s,
                                      const BodyForces& f) {
  const double m = spec.mass_total;
  const double c = std::cos(s.heading);
  const double sn = std::sin(s.heading);
  StateDerivative d;
  d.d = {s.vx * c - s.vy * sn,
         s.vx * sn + s.vy * c,
         s.yaw_rate,
         f.fx / m + s.yaw_rate * s.vy,
         f.fy / m - s.yaw_rate * s.vx,
         f.mz / spec.yaw_inertia_value(),
         0.0};
  return d;
}

// Quasi-static rider lean for layouts without a commanded lean.
double balance_lean(const VehicleSpec& spec, double ay) {
  return std::clamp(std::atan(ay / kGravity), -spec.max_lean, spec.max_lean);
}

double commanded_lean(const VehicleSpec& spec, const ModelCommand& cmd) {
  return std::clamp(cmd.steer_or_lean, -spec.max_lean, spec.max_lean);
}

}  // namespace

// ---------------------------------------------------------------------------
// DynamicsModel defaults

VehicleState DynamicsModel::finalize(const VehicleSpec&, const VehicleState& state,
                                     const ModelCommand&) const {
  return state;
}

PlanarVector DynamicsModel::cg_position(const VehicleSpec&, const VehicleState& state) const {
  return {state.x, state.y};
}

VehicleState DynamicsModel::from_cg_state(const VehicleSpec&,
                                          const VehicleState& cg_state) const {
  return cg_state;
}

std::vector<std::string> DynamicsModel::extra_columns(const VehicleSpec&) const { return {}; }

std::vector<double> DynamicsModel::extra_values(const VehicleSpec&, const VehicleState&,
                                                const ModelCommand&) const {
  return {};
}

// ---------------------------------------------------------------------------
// GM3

Gm3Evaluation gm3_evaluate(const VehicleSpec& spec, const VehicleState& state,
                           const ModelCommand& cmd) {
  const auto* wheel_speed = std::get_if<WheelSpeedCommand>(&cmd.longitudinal);
  if (!wheel_speed) throw ConfigError("gm3 expects a wheel-speed longitudinal command");

  Gm3Evaluation ev;
  const double ax = state.aux_or("ax", 0.0);
  const double ay = state.aux_or("ay", 0.0);
  const bool multi_track = spec.track_width() > 0.0;

  // (1) load transfer, rider lean and lean-to-steer conversion
  if (spec.steering_mode == SteeringMode::kSkateboard) {
    ev.lean = commanded_lean(spec, cmd);
  } else if (spec.lean_enabled) {
    ev.lean = state.lean;
  }
  if (spec.lean_enabled) ev.roll_moment = lean_roll_moment(spec, ev.lean, ay);
  ev.loads = compute_load_distribution(spec, ax, ay, multi_track ? ev.roll_moment : 0.0);
  const auto steer = resolve_steer_angles(spec, cmd.steer_or_lean);

  // (2) control assignment
  const auto speeds = resolve_wheel_speeds(spec, wheel_speed->omega, cmd.steer_or_lean);
  const double camber = (spec.lean_enabled && !multi_track) ? ev.lean : 0.0;
  ev.controls.resize(spec.wheels.size());
  for (std::size_t i = 0; i < spec.wheels.size(); ++i) {
    auto& c = ev.controls[i];
    c.steer = steer[i];
    c.wheel_speed = speeds[i];
    c.free_rolling = !spec.wheels[i].driven;
    c.normal_load = ev.loads.fz[i];
    c.camber_offset = camber;
  }

  // (3) per-tire brush forces, (4) force integration
  ev.forces = assemble_body_forces(spec, state, ev.controls);
  ev.derivative = rigid_body_derivative(spec, state, ev.forces);
  return ev;
}

StateDerivative gm3_derivative(const VehicleSpec& spec, const VehicleState& state,
                               const ModelCommand& cmd) {
  return gm3_evaluate(spec, state, cmd).derivative;
}

StateDerivative Gm3Model::derivative(const VehicleSpec& spec, const VehicleState& state,
                                     const ModelCommand& cmd) const {
  return gm3_derivative(spec, state, cmd);
}

VehicleState Gm3Model::finalize(const VehicleSpec& spec, const VehicleState& state,
                                const ModelCommand& cmd) const {
  const auto ev = gm3_evaluate(spec, state, cmd);
  VehicleState out = state;
  const double ax = ev.forces.fx / spec.mass_total;
  const double ay = ev.forces.fy / spec.mass_total;
  out.aux["ax"] = ax;
  out.aux["ay"] = ay;
  out.aux["mx_rider"] = ev.roll_moment;
  out.aux["lift_count"] = static_cast<double>(ev.loads.lift_count());
  if (spec.steering_mode == SteeringMode::kSkateboard) {
    out.lean = commanded_lean(spec, cmd);
  } else if (spec.lean_enabled) {
    out.lean = balance_lean(spec, ay);
  } else {
    out.lean = 0.0;
  }
  return out;
}

std::vector<std::string> Gm3Model::extra_columns(const VehicleSpec& spec) const {
  std::vector<std::string> cols{"ax", "ay", "mx_rider", "lift_count"};
  for (std::size_t i = 0; i < spec.wheels.size(); ++i) {
    const auto n = std::to_string(i);
    for (const char* f : {"delta_", "fz_", "fx_", "fy_", "mz_"}) cols.push_back(f + n);
  }
  return cols;
}

std::vector<double> Gm3Model::extra_values(const VehicleSpec& spec, const VehicleState& state,
                                           const ModelCommand& cmd) const {
  const auto ev = gm3_evaluate(spec, state, cmd);
  std::vector<double> v{ev.forces.fx / spec.mass_total, ev.forces.fy / spec.mass_total,
                        ev.roll_moment, static_cast<double>(ev.loads.lift_count())};
  for (const auto& t : ev.forces.per_tire) {
    v.insert(v.end(), {t.steer, t.fz, t.tire_frame.fx, t.tire_frame.fy, t.tire_frame.mz});
  }
  return v;
}

// ---------------------------------------------------------------------------
// KBM

namespace {

double kbm_wheelbase(const VehicleSpec& spec) {
  const double l = spec.wheelbase();
  if (!(l > 0.0)) throw ConfigError(spec.name + ": the kinematic bicycle model needs a wheelbase");
  return l;
}

double kbm_acceleration(const VehicleState& state, const ModelCommand& cmd) {
  const auto* a = std::get_if<AccelerationCommand>(&cmd.longitudinal);
  if (!a) throw ConfigError("kbm expects an acceleration longitudinal command");
  double accel = a->accel;
  // Braking decelerates toward standstill and never reverses the vehicle.
  if (cmd.brake > 0.0 && accel < 0.0) {
    if (state.vx < 0.0) accel = -accel;
    else if (state.vx == 0.0) accel = 0.0;
  }
  return accel;
}

}  // namespace

StateDerivative kbm_derivative(const VehicleSpec& spec, const VehicleState& state,
                               const ModelCommand& cmd) {
  const double accel = kbm_acceleration(state, cmd);
  const double l = kbm_wheelbase(spec);
  const double v = state.vx;
  StateDerivative d;
  d.d = {v * std::cos(state.heading), v * std::sin(state.heading),
         v * std::tan(cmd.steer_or_lean) / l, accel, 0.0, 0.0, 0.0};
  return d;
}

StateDerivative KbmModel::derivative(const VehicleSpec& spec, const VehicleState& state,
                                     const ModelCommand& cmd) const {
  return kbm_derivative(spec, state, cmd);
}

VehicleState KbmModel::finalize(const VehicleSpec& spec, const VehicleState& state,
                                const ModelCommand& cmd) const {
  VehicleState out = state;
  out.vy = 0.0;
  out.yaw_rate = state.vx * std::tan(cmd.steer_or_lean) / kbm_wheelbase(spec);
  out.lean = 0.0;
  out.aux["ax"] = kbm_acceleration(state, cmd);
  out.aux["ay"] = state.vx * out.yaw_rate;
  return out;
}

PlanarVector KbmModel::cg_position(const VehicleSpec& spec, const VehicleState& state) const {
  const double lr = axle_geometry(spec).l_rear;
  return {state.x + lr * std::cos(state.heading), state.y + lr * std::sin(state.heading)};
}

VehicleState KbmModel::from_cg_state(const VehicleSpec& spec,
                                     const VehicleState& cg_state) const {
  const double lr = axle_geometry(spec).l_rear;
  VehicleState out = cg_state;
  out.x -= lr * std::cos(cg_state.heading);
  out.y -= lr * std::sin(cg_state.heading);
  return out;
}

// ---------------------------------------------------------------------------
// Registry and stepping

ModelRegistry::ModelRegistry() {
  models_["gm3"] = std::make_shared<Gm3Model>();
  models_["kbm"] = std::make_shared<KbmModel>();
}

ModelRegistry& ModelRegistry::instance() {
  static ModelRegistry registry;
  return registry;
}

void ModelRegistry::add(std::shared_ptr<const DynamicsModel> model) {
  std::lock_guard lock(registry_mutex());
  models_[model->id()] = std::move(model);
}

std::shared_ptr<const DynamicsModel> ModelRegistry::get(const std::string& id) const {
  std::lock_guard lock(registry_mutex());
  auto it = models_.find(id);
  if (it == models_.end()) throw UnknownModelError("unknown model id '" + id + "'");
  return it->second;
}

bool ModelRegistry::contains(const std::string& id) const {
  std::lock_guard lock(registry_mutex());
  return models_.count(id) > 0;
}

std::vector<std::string> ModelRegistry::ids() const {
  std::lock_guard lock(registry_mutex());
  std::vector<std::string> out;
  for (const auto& [k, v] : models_) out.push_back(k);
  return out;
}

VehicleState model_step(const DynamicsModel& model, const VehicleSpec& spec,
                        const VehicleState& state, const ModelCommand& cmd, double dt) {
  if (dt == 0.0) return state;
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  auto next = rk4_step(
      [&](const VehicleState& s) { return model.derivative(spec, s, cmd); }, state, dt);
  next.heading = normalize_angle(next.heading);
  next = model.finalize(spec, next, cmd);
  if (!next.finite()) throw IntegrationFault(model.id() + ": state became non-finite");
  return next;
}

VehicleState model_step(const std::string& model_id, const VehicleSpec& spec,
                        const VehicleState& state, const ModelCommand& cmd, double dt) {
  return model_step(*ModelRegistry::instance().get(model_id), spec, state, cmd, dt);
}

}  // namespace gm3
