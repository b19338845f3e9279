#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "gm3/errors.hpp"
#include "gm3/vehicle_dynamics.hpp"

using namespace gm3;

namespace {

VehicleSpec two_wheel(double lf, double lr, double mass, double h) {
  VehicleSpec s;
  s.wheels = {{lf, 0.0, TireParams{}, true, false}, {-lr, 0.0, TireParams{}, false, true}};
  s.mass_total = mass;
  s.cg_height = h;
  return s;
}

VehicleSpec mirrored(VehicleSpec s) {
  for (auto& w : s.wheels) w.y = -w.y;
  s.rider_cg[1] = -s.rider_cg[1];
  return s;
}

}  // namespace

TEST(Transform, IdentityAtZeroSteerAndYaw) {
  VehicleState st;
  st.vx = 3.0;
  st.vy = -1.0;
  const auto v = body_to_tire_velocity(st, WheelSpec{0.4, 0.2}, 0.0, false);
  EXPECT_DOUBLE_EQ(v.x, 3.0);
  EXPECT_DOUBLE_EQ(v.y, -1.0);
}

TEST(Transform, YawAddsLateralVelocityAtWheel) {
  VehicleState st;
  st.vx = 2.0;
  st.yaw_rate = 1.0;
  const auto v = body_to_tire_velocity(st, WheelSpec{0.5, 0.0}, 0.0, false);
  EXPECT_DOUBLE_EQ(v.x, 2.0);
  EXPECT_DOUBLE_EQ(v.y, 0.5);
}

TEST(Transform, QuarterTurnSteer) {
  VehicleState st;
  st.vx = 2.0;
  const auto v = body_to_tire_velocity(st, WheelSpec{}, M_PI / 2, false);
  EXPECT_NEAR(v.x, 0.0, 1e-15);
  EXPECT_NEAR(v.y, -2.0, 1e-15);
}

TEST(Transform, FullKinematicsAddsTrackTerm) {
  VehicleState st;
  st.vx = 2.0;
  st.yaw_rate = 1.0;
  EXPECT_DOUBLE_EQ(body_to_tire_velocity(st, WheelSpec{0.0, 0.3}, 0.0, true).x, 1.7);
  EXPECT_DOUBLE_EQ(body_to_tire_velocity(st, WheelSpec{0.0, 0.3}, 0.0, false).x, 2.0);
}

TEST(Transform, ForceRotation) {
  const auto unchanged = tire_to_body_forces({3.0, -2.0, 0.0}, 0.0);
  EXPECT_DOUBLE_EQ(unchanged.x, 3.0);
  EXPECT_DOUBLE_EQ(unchanged.y, -2.0);
  const auto quarter = tire_to_body_forces({10.0, 0.0, 0.0}, M_PI / 2);
  EXPECT_NEAR(quarter.x, 0.0, 1e-14);
  EXPECT_NEAR(quarter.y, 10.0, 1e-14);
}

TEST(Transform, RoundTripRecoversForces) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> f(-500, 500), d(-1.5, 1.5);
  for (int k = 0; k < 1000; ++k) {
    const TireForces in{f(rng), f(rng), 0.0};
    const double delta = d(rng);
    const auto body = tire_to_body_forces(in, delta);
    const auto back = tire_to_body_forces({body.x, body.y, 0.0}, -delta);
    const double scale = std::hypot(in.fx, in.fy);
    EXPECT_NEAR(back.x, in.fx, 1e-12 * scale);
    EXPECT_NEAR(back.y, in.fy, 1e-12 * scale);
  }
}

TEST(Loads, StaticSplitByHand) {
  const auto loads = compute_load_distribution(two_wheel(0.5, 0.5, 100.0, 0.5), 0.0, 0.0);
  EXPECT_NEAR(loads.fz[0], 490.5, 1e-9);
  EXPECT_NEAR(loads.fz[1], 490.5, 1e-9);
}

TEST(Loads, LongitudinalTransferByHand) {
  const auto loads = compute_load_distribution(two_wheel(0.5, 0.5, 100.0, 0.5), 2.0, 0.0);
  EXPECT_NEAR(loads.t_long, 100.0, 1e-12);
  EXPECT_NEAR(loads.fz[0], 390.5, 1e-9);
  EXPECT_NEAR(loads.fz[1], 590.5, 1e-9);
}

TEST(Loads, AxleDistanceUsesGroupCentroids) {
  auto s = make_cart();
  const auto axles = axle_geometry(s);
  EXPECT_EQ(axles.n_front, 2u);
  EXPECT_EQ(axles.n_rear, 2u);
  EXPECT_NEAR(axles.axle_distance(), 1.65, 1e-12);
  const auto rest = compute_load_distribution(s, 0.0, 0.0);
  double moment = 0.0;
  for (std::size_t i = 0; i < s.wheels.size(); ++i) moment += rest.fz[i] * s.wheels[i].x;
  EXPECT_NEAR(moment, 0.0, 1e-9);
}

TEST(Loads, LateralTransferShiftsToOutside) {
  const auto s = make_cart();
  const auto loads = compute_load_distribution(s, 0.0, 2.0);
  // +ay points right; load moves to the left (y < 0) wheels.
  EXPECT_GT(loads.fz[0], loads.fz[1]);
  EXPECT_GT(loads.fz[2], loads.fz[3]);
  EXPECT_NEAR(std::accumulate(loads.fz.begin(), loads.fz.end(), 0.0), s.mass_total * kGravity,
              1e-9 * s.mass_total * kGravity);
}

TEST(Loads, ExtremeTransferLiftsWheels) {
  const auto loads = compute_load_distribution(make_cart(), 0.0, 30.0);
  EXPECT_EQ(loads.lift_count(), 2u);
  for (double f : loads.fz) EXPECT_GE(f, 0.0);
}

TEST(Loads, SingleAxleHasNoLongitudinalTransfer) {
  VehicleSpec s;
  s.wheels = {{0.0, 0.0, TireParams{}, false, true}};
  s.yaw_inertia = 1.0;
  const auto loads = compute_load_distribution(s, 3.0, 0.0);
  EXPECT_EQ(loads.t_long, 0.0);
  EXPECT_NEAR(loads.fz[0], s.mass_total * kGravity, 1e-12);
}

TEST(Lean, UprightStraightIsZero) {
  VehicleSpec s = make_bicycle();
  s.rider_cg = {0.0, 0.0, 1.0};
  EXPECT_EQ(lean_roll_moment(s, 0.0, 0.0), 0.0);
}

TEST(Lean, TiltedRiderByHand) {
  VehicleSpec s = make_bicycle();
  s.mass_rider = 70.0;
  s.rider_cg = {0.0, 0.0, 1.0};
  EXPECT_NEAR(lean_roll_moment(s, 0.2, 0.0), std::sin(0.2) * 70.0 * 9.81, 1e-9);
  EXPECT_NEAR(lean_roll_moment(s, 0.2, 0.0), 136.4, 0.05);
}

TEST(Lean, BalanceLeanCancelsMoment) {
  VehicleSpec s = make_bicycle();
  s.mass_rider = 70.0;
  s.rider_cg = {0.0, 0.0, 1.0};
  const double ay = 1.5;
  // y_rot m g + m ay h = 0 with y_rot = h sin(phi).
  const double phi = std::asin(-ay / kGravity);
  EXPECT_NEAR(lean_roll_moment(s, phi, ay), 0.0, 1e-9);
}

TEST(Skateboard, ByHand) {
  const auto t = skateboard_steer(0.1, M_PI / 6, 0.8);
  EXPECT_NEAR(t.front, 0.04, 1e-15);
  EXPECT_NEAR(t.rear, -0.04, 1e-15);
  const auto zero = skateboard_steer(0.0, 0.5, 1.0);
  EXPECT_EQ(zero.front, 0.0);
  EXPECT_EQ(zero.front + zero.rear, 0.0);
}

TEST(Skateboard, LayoutTrucksOpposite) {
  const auto s = make_skateboard();
  const auto d = resolve_steer_angles(s, 0.2);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_NE(d[i], 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (s.wheels[i].x > 0 && s.wheels[j].x <= 0) EXPECT_EQ(d[i], -d[j]);
    }
  }
}

TEST(Ackermann, CotangentRelation) {
  const double l = 1.65, w = 0.9, delta = 0.3;
  const double inner = ackermann_wheel_angle(delta, l, w / 2, 0.0, l);
  const double outer = ackermann_wheel_angle(delta, l, -w / 2, 0.0, l);
  EXPECT_NEAR(1.0 / std::tan(inner), 1.0 / std::tan(delta) - w / (2 * l), 1e-12);
  EXPECT_NEAR(1.0 / std::tan(outer), 1.0 / std::tan(delta) + w / (2 * l), 1e-12);
  EXPECT_GT(inner, outer);
}

TEST(Ackermann, CartFrontWheelsOnly) {
  const auto s = make_cart();
  const auto d = resolve_steer_angles(s, 0.2);
  EXPECT_GT(d[0], 0.0);
  EXPECT_GT(d[1], d[0]);
  EXPECT_EQ(d[2], 0.0);
  EXPECT_EQ(d[3], 0.0);
}

TEST(Assembly, SymmetricCartRollingStraightIsBalanced) {
  const auto s = make_cart();
  VehicleState st;
  st.vx = 3.0;
  const auto loads = compute_load_distribution(s, 0.0, 0.0);
  std::vector<WheelControl> ctl(s.wheels.size());
  for (std::size_t i = 0; i < ctl.size(); ++i) {
    ctl[i].normal_load = loads.fz[i];
    ctl[i].free_rolling = !s.wheels[i].driven;
    ctl[i].wheel_speed = 3.0 / s.wheels[i].tire.effective_rolling_radius();
  }
  const auto f = assemble_body_forces(s, st, ctl);
  EXPECT_NEAR(f.fx, 0.0, 1e-9);
  EXPECT_NEAR(f.fy, 0.0, 1e-9);
  EXPECT_NEAR(f.mz, 0.0, 1e-9);
}

TEST(Assembly, SingleTireAtOriginEqualsTireForces) {
  VehicleSpec s;
  s.wheels = {{0.0, 0.0, TireParams{}, false, true}};
  s.yaw_inertia = 1.0;
  VehicleState st;
  st.vx = 2.0;
  st.vy = 0.3;
  std::vector<WheelControl> ctl(1);
  ctl[0].normal_load = 500.0;
  ctl[0].free_rolling = false;
  ctl[0].wheel_speed = 8.0;
  const auto f = assemble_body_forces(s, st, ctl);
  EXPECT_EQ(f.fx, f.per_tire[0].tire_frame.fx);
  EXPECT_EQ(f.fy, f.per_tire[0].tire_frame.fy);
  EXPECT_EQ(f.mz, s.aligning_gain * f.per_tire[0].tire_frame.mz);
}

TEST(Assembly, MirrorSymmetry) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& base : {make_cart(), make_bicycle(), make_skateboard()}) {
    VehicleSpec s = base;
    for (auto& w : s.wheels) w.tire.camber = 0.0;
    s.lean_enabled = false;
    const auto m = mirrored(s);
    for (int k = 0; k < 50; ++k) {
      VehicleState st;
      st.vx = 1.0 + 3.0 * std::abs(u(rng));
      st.vy = 0.5 * u(rng);
      st.yaw_rate = 0.8 * u(rng);
      const double steer = 0.2 * u(rng);
      VehicleState ms = st;
      ms.vy = -st.vy;
      ms.yaw_rate = -st.yaw_rate;

      auto controls = [&](const VehicleSpec& spec, double d) {
        const auto loads = compute_load_distribution(spec, 0.0, 0.0);
        const auto angles = resolve_steer_angles(spec, d);
        std::vector<WheelControl> c(spec.wheels.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
          c[i].steer = angles[i];
          c[i].normal_load = loads.fz[i];
          c[i].free_rolling = !spec.wheels[i].driven;
          c[i].wheel_speed = st.vx * 1.05 / spec.wheels[i].tire.effective_rolling_radius();
        }
        return c;
      };
      const auto a = assemble_body_forces(s, st, controls(s, steer));
      const auto b = assemble_body_forces(m, ms, controls(m, -steer));
      const double scale = 1.0 + std::abs(a.fx) + std::abs(a.fy) + std::abs(a.mz);
      EXPECT_NEAR(b.fx, a.fx, 1e-9 * scale);
      EXPECT_NEAR(b.fy, -a.fy, 1e-9 * scale);
      EXPECT_NEAR(b.mz, -a.mz, 1e-9 * scale);

      double fx = 0, fy = 0;
      for (const auto& t : a.per_tire) {
        fx += t.body.x;
        fy += t.body.y;
      }
      EXPECT_EQ(fx, a.fx);
      EXPECT_EQ(fy, a.fy);
    }
  }
}

TEST(Assembly, ControlCountMustMatch) {
  EXPECT_THROW(assemble_body_forces(make_cart(), VehicleState{}, {}), ConfigError);
}

TEST(Differential, SteerSplitsWheelSpeeds) {
  VehicleSpec s;
  s.steering_mode = SteeringMode::kDifferential;
  s.wheels = {{0.0, -0.25, TireParams{}, false, true}, {0.0, 0.25, TireParams{}, false, true}};
  s.differential_reference_length = 0.5;
  const auto w = resolve_wheel_speeds(s, 10.0, std::atan(0.2));
  EXPECT_NEAR(w[0], 11.0, 1e-12);
  EXPECT_NEAR(w[1], 9.0, 1e-12);
}
