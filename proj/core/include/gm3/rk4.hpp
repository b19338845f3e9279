#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include "gm3/errors.hpp"
#include "gm3/state.hpp"

namespace gm3 {

// Vector-space hooks used by rk4_step. Overloads exist for scalars, fixed
// arrays and VehicleState/StateDerivative; other state types can add their
// own in their namespace.
inline double advance(double s, double d, double h) { return s + h * d; }
inline double rk4_weighted(double k1, double k2, double k3, double k4) {
  return k1 + 2.0 * k2 + 2.0 * k3 + k4;
}
inline bool is_finite(double v) { return std::isfinite(v); }

template <std::size_t N>
std::array<double, N> advance(const std::array<double, N>& s, const std::array<double, N>& d,
                              double h) {
  std::array<double, N> out = s;
  for (std::size_t i = 0; i < N; ++i) out[i] += h * d[i];
  return out;
}

template <std::size_t N>
std::array<double, N> rk4_weighted(const std::array<double, N>& k1,
                                   const std::array<double, N>& k2,
                                   const std::array<double, N>& k3,
                                   const std::array<double, N>& k4) {
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i];
  return out;
}

template <std::size_t N>
bool is_finite(const std::array<double, N>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline StateDerivative rk4_weighted(const StateDerivative& k1, const StateDerivative& k2,
                                    const StateDerivative& k3, const StateDerivative& k4) {
  return {rk4_weighted(k1.d, k2.d, k3.d, k4.d)};
}
inline bool is_finite(const StateDerivative& d) { return d.finite(); }

// Classical fourth-order Runge-Kutta step of ds/dt = f(s). Throws
// IntegrationFault if any stage derivative is non-finite.
template <typename State, typename DerivativeFn>
State rk4_step(DerivativeFn&& f, const State& s, double dt) {
  auto check = [](const auto& k) {
    if (!is_finite(k)) throw IntegrationFault("non-finite derivative in RK4 stage");
    return k;
  };
  const auto k1 = check(f(s));
  const auto k2 = check(f(advance(s, k1, 0.5 * dt)));
  const auto k3 = check(f(advance(s, k2, 0.5 * dt)));
  const auto k4 = check(f(advance(s, k3, dt)));
  return advance(s, rk4_weighted(k1, k2, k3, k4), dt / 6.0);
}

// Zero-order hold: `cmd` is held constant across the four stages.
template <typename State, typename Command, typename DerivativeFn>
State rk4_step(DerivativeFn&& f, const State& s, const Command& cmd, double dt) {
  return rk4_step([&](const State& x) { return f(x, cmd); }, s, dt);
}

}  // namespace gm3
