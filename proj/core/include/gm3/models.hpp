#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gm3/state.hpp"
#include "gm3/vehicle_dynamics.hpp"
#include "gm3/vehicle_spec.hpp"

namespace gm3 {

enum class LongitudinalInput { kWheelSpeed, kAcceleration };

// A dynamics model maps (spec, state, command) to a state derivative.
// `finalize` runs once after each accepted integration step and refreshes
// algebraic fields (aux accelerations, lean) that are not integrated.
class DynamicsModel {
public:
  virtual ~DynamicsModel() = default;

  virtual std::string id() const = 0;
  virtual LongitudinalInput longitudinal_input() const { return LongitudinalInput::kAcceleration; }
  // True when the model's steer_or_lean input is a rider lean angle.
  virtual bool steer_is_lean(const VehicleSpec&) const { return false; }
  virtual StateDerivative derivative(const VehicleSpec& spec, const VehicleState& state,
                                     const ModelCommand& cmd) const = 0;
  virtual VehicleState finalize(const VehicleSpec& spec, const VehicleState& state,
                                const ModelCommand& cmd) const;

  // Position of the center of gravity for a state of this model.
  virtual PlanarVector cg_position(const VehicleSpec& spec, const VehicleState& state) const;
  // Inverse of cg_position: places the model's reference point so that the
  // CG lands at (cg_state.x, cg_state.y).
  virtual VehicleState from_cg_state(const VehicleSpec& spec,
                                     const VehicleState& cg_state) const;

  // Model-specific log columns appended after the common ones.
  virtual std::vector<std::string> extra_columns(const VehicleSpec& spec) const;
  virtual std::vector<double> extra_values(const VehicleSpec& spec, const VehicleState& state,
                                           const ModelCommand& cmd) const;
};

// Everything the tire-level pipeline computes for one evaluation.
struct Gm3Evaluation {
  LoadDistribution loads;
  std::vector<WheelControl> controls;
  BodyForces forces;
  double lean = 0.0;
  double roll_moment = 0.0;
  StateDerivative derivative;
};

// Load transfer and lean-to-steer, control assignment, per-tire brush
// forces, then force integration into the planar rigid-body equations.
Gm3Evaluation gm3_evaluate(const VehicleSpec& spec, const VehicleState& state,
                           const ModelCommand& cmd);
StateDerivative gm3_derivative(const VehicleSpec& spec, const VehicleState& state,
                               const ModelCommand& cmd);

// Rear-axle-referenced kinematic bicycle model; state.vx is the speed.
StateDerivative kbm_derivative(const VehicleSpec& spec, const VehicleState& state,
                               const ModelCommand& cmd);

class Gm3Model final : public DynamicsModel {
public:
  std::string id() const override { return "gm3"; }
  LongitudinalInput longitudinal_input() const override { return LongitudinalInput::kWheelSpeed; }
  bool steer_is_lean(const VehicleSpec& spec) const override {
    return spec.steering_mode == SteeringMode::kSkateboard;
  }
  StateDerivative derivative(const VehicleSpec& spec, const VehicleState& state,
                             const ModelCommand& cmd) const override;
  VehicleState finalize(const VehicleSpec& spec, const VehicleState& state,
                        const ModelCommand& cmd) const override;
  std::vector<std::string> extra_columns(const VehicleSpec& spec) const override;
  std::vector<double> extra_values(const VehicleSpec& spec, const VehicleState& state,
                                   const ModelCommand& cmd) const override;
};

class KbmModel final : public DynamicsModel {
public:
  std::string id() const override { return "kbm"; }
  StateDerivative derivative(const VehicleSpec& spec, const VehicleState& state,
                             const ModelCommand& cmd) const override;
  VehicleState finalize(const VehicleSpec& spec, const VehicleState& state,
                        const ModelCommand& cmd) const override;
  PlanarVector cg_position(const VehicleSpec& spec, const VehicleState& state) const override;
  VehicleState from_cg_state(const VehicleSpec& spec,
                             const VehicleState& cg_state) const override;
};

// String-keyed model lookup. The default registry holds "gm3" and "kbm".
class ModelRegistry {
public:
  static ModelRegistry& instance();

  void add(std::shared_ptr<const DynamicsModel> model);
  std::shared_ptr<const DynamicsModel> get(const std::string& id) const;
  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;

private:
  ModelRegistry();
  std::map<std::string, std::shared_ptr<const DynamicsModel>> models_;
};

// One integration step of the named model (RK4, zero-order-hold command,
// heading wrapped, then finalize). dt == 0 returns the state unchanged.
VehicleState model_step(const std::string& model_id, const VehicleSpec& spec,
                        const VehicleState& state, const ModelCommand& cmd, double dt);
VehicleState model_step(const DynamicsModel& model, const VehicleSpec& spec,
                        const VehicleState& state, const ModelCommand& cmd, double dt);

}  // namespace gm3
