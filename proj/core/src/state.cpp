#include "gm3/state.hpp"

#include <cmath>
#include <numbers>

namespace gm3 {

void VehicleState::set_integrated(const std::array<double, kIntegrated>& v) {
  x = v[0];
  y = v[1];
  heading = v[2];
  vx = v[3];
  vy = v[4];
  yaw_rate = v[5];
  lean = v[6];
}

double VehicleState::aux_or(const std::string& key, double fallback) const {
  auto it = aux.find(key);
  return it == aux.end() ? fallback : it->second;
}

bool VehicleState::finite() const {
  for (double v : integrated()) {
    if (!std::isfinite(v)) return false;
  }
  for (const auto& [k, v] : aux) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool StateDerivative::finite() const {
  for (double v : d) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double normalize_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  if (a > -kPi && a <= kPi) return a;
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

VehicleState advance(const VehicleState& s, const StateDerivative& d, double h) {
  auto v = s.integrated();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += h * d.d[i];
  VehicleState out = s;
  out.set_integrated(v);
  return out;
}

double ModelCommand::longitudinal_value() const {
  return std::visit([](const auto& c) {
    if constexpr (requires { c.omega; }) {
      return c.omega;
    } else {
      return c.accel;
    }
  }, longitudinal);
}

}  // namespace gm3
