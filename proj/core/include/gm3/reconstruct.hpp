#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gm3/controls.hpp"
#include "gm3/metrics.hpp"
#include "gm3/models.hpp"
#include "gm3/simulator.hpp"

namespace gm3 {

struct ReconstructionOptions {
  int smoothing_window = 5;        // odd, centered moving average
  double slow_speed = 0.1;         // m/s; heading and steer are held below it
  double min_median_speed = 0.1;   // m/s; slower tracks are excluded
  int substeps = 6;                // integrator steps per frame interval
};

// Kinematic quantities estimated from an observed track, one per sample.
struct TrackKinematics {
  std::vector<Point2> smoothed;
  std::vector<double> speed;
  std::vector<double> heading;  // unwrapped
  std::vector<double> yaw_rate;
  std::vector<double> steer;    // bicycle-equivalent angle, clamped to limits
};

// Centered moving average whose window shrinks symmetrically at the ends,
// so the first and last samples are kept.
std::vector<Point2> smooth_positions(const std::vector<Point2>& p, int window);

TrackKinematics estimate_kinematics(const Trajectory& track, double wheelbase,
                                    double max_steer, const ReconstructionOptions& options = {});

double median_speed(const Trajectory& track);

// Intents for each frame interval plus the CG-referenced starting state.
// Steering intents are shared by every model; the longitudinal channel
// follows the model's native input.
struct ReconstructedControls {
  VehicleState initial_cg_state;
  std::vector<ControlCommand> intents;  // size = samples - 1
};

ReconstructedControls reconstruct_controls(const Trajectory& track, const VehicleConfig& config,
                                           const DynamicsModel& model,
                                           const ReconstructionOptions& options = {});

// The same reconstruction as a replayable script for `model_id` (initial
// state in the model's reference frame, one timeline entry per interval,
// controls primed).
ControlScript reconstruct_script(const Trajectory& track, const std::string& model_id,
                                 const VehicleConfig& config,
                                 const ReconstructionOptions& options = {});

// Replays the reconstructed intents and returns CG positions at the
// observation times. Throws IntegrationFault if the run diverges.
Trajectory simulate_track(const Trajectory& track, const VehicleConfig& config,
                          std::shared_ptr<const DynamicsModel> model,
                          const ReconstructionOptions& options = {});

}  // namespace gm3
