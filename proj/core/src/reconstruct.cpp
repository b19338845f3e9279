#include "gm3/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gm3/errors.hpp"

namespace gm3 {

std::vector<Point2> smooth_positions(const std::vector<Point2>& p, int window) {
  if (window < 1 || window % 2 == 0) throw DataError("smoothing window must be a positive odd number");
  const auto n = static_cast<long>(p.size());
  const long half = window / 2;
  std::vector<Point2> out(p.size());
  for (long i = 0; i < n; ++i) {
    const long h = std::min({half, i, n - 1 - i});
    Point2 s;
    for (long j = i - h; j <= i + h; ++j) {
      s.x += p[static_cast<std::size_t>(j)].x;
      s.y += p[static_cast<std::size_t>(j)].y;
    }
    const double c = static_cast<double>(2 * h + 1);
    out[static_cast<std::size_t>(i)] = {s.x / c, s.y / c};
  }
  return out;
}

namespace {

// Centered differences inside, one-sided at the ends.
template <typename Get>
double diff_at(std::size_t i, std::size_t n, double dt, Get get) {
  if (i == 0) return (get(1) - get(0)) / dt;
  if (i + 1 == n) return (get(n - 1) - get(n - 2)) / dt;
  return (get(i + 1) - get(i - 1)) / (2.0 * dt);
}

}  // namespace

TrackKinematics estimate_kinematics(const Trajectory& track, double wheelbase, double max_steer,
                                    const ReconstructionOptions& opt) {
  track.validate();
  const double dt = track.dt();
  const std::size_t n = track.points.size();
  TrackKinematics k;
  k.smoothed = smooth_positions(positions(track), opt.smoothing_window);
  const auto& s = k.smoothed;

  std::vector<double> vx(n), vy(n);
  k.speed.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    vx[i] = diff_at(i, n, dt, [&](std::size_t j) { return s[j].x; });
    vy[i] = diff_at(i, n, dt, [&](std::size_t j) { return s[j].y; });
    k.speed[i] = std::hypot(vx[i], vy[i]);
  }

  // Heading from the velocity direction; held through slow samples and
  // back-filled before the first moving one.
  k.heading.assign(n, 0.0);
  std::optional<std::size_t> first_moving;
  for (std::size_t i = 0; i < n; ++i) {
    if (k.speed[i] >= opt.slow_speed) {
      first_moving = i;
      break;
    }
  }
  double prev = first_moving ? std::atan2(vy[*first_moving], vx[*first_moving]) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double h = prev;
    if (k.speed[i] >= opt.slow_speed) {
      const double raw = std::atan2(vy[i], vx[i]);
      h = prev + normalize_angle(raw - prev);
    }
    k.heading[i] = h;
    prev = h;
  }

  k.yaw_rate.resize(n);
  k.steer.resize(n);
  double held_steer = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    k.yaw_rate[i] = diff_at(i, n, dt, [&](std::size_t j) { return k.heading[j]; });
    if (k.speed[i] >= opt.slow_speed) {
      held_steer = std::clamp(std::atan(wheelbase * k.yaw_rate[i] / k.speed[i]), -max_steer,
                              max_steer);
    }
    k.steer[i] = held_steer;
  }
  return k;
}

double median_speed(const Trajectory& track) {
  track.validate();
  const double dt = track.dt();
  std::vector<double> v;
  v.reserve(track.points.size() - 1);
  for (std::size_t i = 1; i < track.points.size(); ++i) {
    const auto& a = track.points[i - 1];
    const auto& b = track.points[i];
    v.push_back(std::hypot(b.x - a.x, b.y - a.y) / dt);
  }
  const auto mid = v.begin() + static_cast<long>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

ReconstructedControls reconstruct_controls(const Trajectory& track, const VehicleConfig& config,
                                           const DynamicsModel& model,
                                           const ReconstructionOptions& opt) {
  const auto& lim = config.limits;
  const double wheelbase = config.spec.wheelbase();
  if (!(wheelbase > 0.0)) {
    throw ConfigError(config.spec.name + ": trajectory replay needs a nonzero wheelbase");
  }
  const auto k = estimate_kinematics(track, wheelbase, lim.max_steer, opt);
  const double dt = track.dt();
  const std::size_t n = track.points.size();

  ReconstructedControls out;
  auto& s0 = out.initial_cg_state;
  s0.x = k.smoothed[0].x;
  s0.y = k.smoothed[0].y;
  s0.heading = normalize_angle(k.heading[0]);
  s0.vx = k.speed[0];

  out.intents.reserve(n - 1);
  // Speed implied by the saturated acceleration commands issued so far;
  // each interval aims at the observed speed from there, so clipping is
  // carried forward rather than accumulated.
  double implied_speed = k.speed[0];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    ControlCommand c;
    c.timestamp = track.points[i].t - track.points[0].t;
    c.steering = 0.5 * (k.steer[i] + k.steer[i + 1]) / lim.max_steer;
    if (model.longitudinal_input() == LongitudinalInput::kWheelSpeed) {
      const double v = 0.5 * (k.speed[i] + k.speed[i + 1]);
      c.speed = (v / lim.wheel_radius) / lim.max_wheel_speed;
      c = c.saturated();
    } else {
      const double a = (k.speed[i + 1] - implied_speed) / dt;
      if (a >= 0.0) c.speed = a / lim.max_accel;
      else c.brake = -a / lim.max_decel;
      c = c.saturated();
      const double applied = c.brake > 0.0 ? -c.brake * lim.max_decel : c.speed * lim.max_accel;
      implied_speed = std::max(implied_speed + applied * dt, 0.0);
    }
    out.intents.push_back(c);
  }
  return out;
}

ControlScript reconstruct_script(const Trajectory& track, const std::string& model_id,
                                 const VehicleConfig& config, const ReconstructionOptions& opt) {
  const auto model = ModelRegistry::instance().get(model_id);
  const auto rec = reconstruct_controls(track, config, *model, opt);
  ControlScript script;
  script.vehicle_kind = config.spec.name;
  script.model_type = model_id;
  script.initial_state = model->from_cg_state(config.spec, rec.initial_cg_state);
  script.prime_controls = true;
  for (const auto& c : rec.intents) script.timeline.push_back({c.timestamp, c});
  script.duration = track.points.back().t - track.points.front().t;
  return script;
}

Trajectory simulate_track(const Trajectory& track, const VehicleConfig& config,
                          std::shared_ptr<const DynamicsModel> model,
                          const ReconstructionOptions& opt) {
  if (!model) throw UnknownModelError("null model");
  if (opt.substeps < 1) throw DataError("substeps must be at least 1");
  const auto rec = reconstruct_controls(track, config, *model, opt);
  VehicleConfig cfg = config;
  cfg.dt = track.dt() / static_cast<double>(opt.substeps);

  const auto start = model->from_cg_state(cfg.spec, rec.initial_cg_state);
  Simulator sim(cfg, std::move(model), start);
  if (!rec.intents.empty()) sim.prime_controls(rec.intents.front());

  Trajectory out;
  out.mode = track.mode;
  out.track_id = track.track_id;
  out.points.reserve(track.points.size());
  auto record = [&](std::size_t i) {
    const auto p = sim.cg_position();
    out.points.push_back({track.points[i].t, p.x, p.y});
  };
  record(0);
  for (std::size_t i = 0; i < rec.intents.size(); ++i) {
    for (int s = 0; s < opt.substeps; ++s) {
      if (!sim.step(rec.intents[i])) {
        throw IntegrationFault(track.track_id + ": " + sim.log().metadata.error.value_or("fault"));
      }
    }
    record(i + 1);
  }
  return out;
}

}  // namespace gm3
