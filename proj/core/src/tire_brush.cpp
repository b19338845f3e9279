#include "gm3/tire_brush.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gm3/errors.hpp"

namespace gm3 {
namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string("tire parameter '") + name + "' must be positive and finite");
  }
}

}  // namespace

void TireParams::validate() const {
  require_positive(half_contact_length, "half_contact_length");
  require_positive(radius, "radius");
  require_positive(friction, "mu");
  require_positive(tread_stiffness, "cp");
  if (!(camber_reduction >= 0.0 && camber_reduction <= 1.0)) {
    throw ConfigError("tire parameter 'camber_reduction' must lie in [0, 1]");
  }
  if (!std::isfinite(camber)) {
    throw ConfigError("tire parameter 'camber' must be finite");
  }
  if (!std::isfinite(rolling_radius)) {
    throw ConfigError("tire parameter 'rolling_radius' must be finite");
  }
}

double turn_slip(double inv_turn_radius, const TireParams& params) {
  return -inv_turn_radius +
         (1.0 - params.camber_reduction) * std::sin(params.camber) * inv_turn_radius;
}

double brush_force_shape(double u) {
  return 3.0 * u - 3.0 * u * std::abs(u) + u * u * u;
}

double brush_moment_shape(double u) {
  const double m = 1.0 - std::abs(u);
  return u * m * m * m;
}

SlipState compute_slip(const TireInputs& in, const TireParams& p,
                       const SlipGuards& guards, DegeneratePolicy policy) {
  if (!(in.normal_load >= 0.0)) {
    throw std::invalid_argument("normal load must be non-negative");
  }
  SlipState s;
  const double re = p.effective_rolling_radius();
  const double vx = in.longitudinal_velocity;
  const double slip_vx = vx - in.wheel_speed * re;
  const double slip_vy = in.lateral_velocity;
  const double denom = std::max(std::abs(vx), guards.v_eps);

  const bool standstill = std::abs(vx) < guards.standstill_speed &&
                          std::abs(slip_vx) < guards.standstill_speed &&
                          std::abs(slip_vy) < guards.standstill_speed;
  if (standstill) {
    s.clamped = true;
  } else {
    s.kappa = -slip_vx / denom;
    s.tan_alpha = -slip_vy / denom;
  }
  if (std::abs(vx) < guards.v_eps && !standstill) s.clamped = true;

  double one_plus_kappa = 1.0 + s.kappa;
  if (one_plus_kappa < guards.kappa_eps) {
    if (policy == DegeneratePolicy::kThrow) {
      throw SlipDegeneracyError("1 + kappa = " + std::to_string(one_plus_kappa) +
                                " is below the guard; wheel is locked against the motion");
    }
    one_plus_kappa = guards.kappa_eps;
    s.clamped = true;
  }
  s.sigma_x = s.kappa / one_plus_kappa;
  s.sigma_y = s.tan_alpha / one_plus_kappa;
  s.sigma = std::hypot(s.sigma_x, s.sigma_y);

  const double r_turn = in.turn_radius;
  const bool straight = !std::isfinite(r_turn) || r_turn == 0.0 ||
                        std::abs(r_turn) > guards.straight_turn_radius;
  s.spin = turn_slip(straight ? 0.0 : 1.0 / r_turn, p);

  if (in.normal_load > 0.0) {
    s.theta = 2.0 * p.tread_stiffness * p.half_contact_length * p.half_contact_length /
              (3.0 * p.friction * in.normal_load);
    const double d =
        1.0 - p.half_contact_length * s.spin * s.theta * sgn(s.tan_alpha);
    s.theta_star = s.theta / std::max(d, guards.theta_star_floor);
  }
  return s;
}

TireForces compute_forces(const SlipState& s, const TireInputs& in, const TireParams& p) {
  TireForces f;
  const double fz = in.normal_load;
  if (!(fz > 0.0)) return f;
  const double peak = p.friction * fz;

  if (s.sigma > 0.0) {
    const double u = s.theta * s.sigma;
    const double direction = s.sigma_x / s.sigma;
    f.fx = u <= 1.0 ? peak * direction * brush_force_shape(u) : peak * direction;
  }

  const double uy = s.theta_star * s.sigma_y;
  if (std::abs(uy) <= 1.0) {
    const double a = p.half_contact_length;
    f.fy = peak * brush_force_shape(uy) + (2.0 / 3.0) * p.tread_stiffness * a * a * a * s.spin;
    f.mz = -peak * a * brush_moment_shape(uy);
  } else {
    f.fy = peak * sgn(s.tan_alpha);
    f.mz = 0.0;
  }
  return f;
}

}  // namespace gm3
