#pragma once

// Isotropic brush tire model: slip quantities and the resulting
// longitudinal force, lateral force and aligning moment of one tire.
//
// Axis convention: x forward along the wheel plane, y to the right of x,
// angles measured from +x toward +y.

namespace gm3 {

struct TireParams {
  double half_contact_length = 0.05;  // a [m]
  double radius = 0.3;                // R [m]
  double camber = 0.0;                // gamma [rad]
  double friction = 0.8;              // mu [-]
  double tread_stiffness = 2.0e5;     // c_p [N/m^2]
  double camber_reduction = 0.5;      // eps_gamma in [0, 1]
  double rolling_radius = 0.0;        // R_e [m]; <= 0 means "use radius"

  double effective_rolling_radius() const {
    return rolling_radius > 0.0 ? rolling_radius : radius;
  }

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct TireInputs {
  double normal_load = 0.0;            // F_z [N]
  double wheel_speed = 0.0;            // Omega [rad/s]
  double steer = 0.0;                  // delta [rad]
  double yaw_rate = 0.0;               // r [rad/s]
  double slip_angle = 0.0;             // alpha [rad], informational
  double longitudinal_velocity = 0.0;  // V_x in the tire frame [m/s]
  double lateral_velocity = 0.0;       // V_y in the tire frame [m/s]
  double turn_radius = 0.0;            // r_turn [m], signed, may be +-inf
};

struct SlipState {
  double kappa = 0.0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double sigma = 0.0;       // |(sigma_x, sigma_y)|
  double spin = 0.0;        // turn slip phi [1/m]
  double tan_alpha = 0.0;
  double theta = 0.0;       // composite parameter, 0 when unloaded
  double theta_star = 0.0;  // camber-modified composite parameter
  bool clamped = false;     // a low-speed or 1+kappa guard fired
};

struct TireForces {
  double fx = 0.0;
  double fy = 0.0;
  double mz = 0.0;
};

// Regularization constants for the singular corners of the slip
// definitions.
struct SlipGuards {
  double v_eps = 0.1;                 // denominator floor for |V_x| [m/s]
  double standstill_speed = 0.01;     // below this slip may be zeroed [m/s]
  double kappa_eps = 1.0e-3;          // floor for 1 + kappa
  double straight_turn_radius = 1.0e6;  // |r_turn| above this counts as straight [m]
  double theta_star_floor = 1.0e-3;   // floor for 1 - a*phi*theta*sgn(alpha)
};

enum class DegeneratePolicy { kThrow, kClamp };

double turn_slip(double inv_turn_radius, const TireParams& params);

SlipState compute_slip(const TireInputs& inputs, const TireParams& params,
                       const SlipGuards& guards = {},
                       DegeneratePolicy policy = DegeneratePolicy::kThrow);

TireForces compute_forces(const SlipState& slip, const TireInputs& inputs,
                          const TireParams& params);

// The normalized adhesion-region polynomials, u = theta * sigma.
// Force shape: 3u - 3u|u| + u^3 (odd, reaches sgn(u) at |u| = 1).
// Moment shape: u (1 - |u|)^3 (odd, vanishes at |u| = 1).
double brush_force_shape(double u);
double brush_moment_shape(double u);

}  // namespace gm3
