// Acceptance suite: one PASS / FAIL / SKIPPED line per primary criterion.
// Exit status is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "gm3/config.hpp"
#include "gm3/csv_log.hpp"
#include "gm3/evaluation.hpp"
#include "gm3/metrics.hpp"
#include "gm3/models.hpp"
#include "gm3/rk4.hpp"
#include "gm3/simulator.hpp"
#include "gm3/tire_brush.hpp"
#include "gm3/vehicle_dynamics.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace gm3;

namespace {

enum class Verdict { kPass, kFail, kSkipped };

struct Outcome {
  Verdict verdict = Verdict::kPass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path source_root() { return fs::path(GM3_TEST_SOURCE_ROOT); }

// ---------------------------------------------------------------------------

Outcome brush_curve_suite() {
  const auto t0 = Clock::now();
  TireParams p;
  p.half_contact_length = 0.05;
  p.tread_stiffness = 2.0e5;
  p.friction = 0.9;
  const double fz = 500.0;
  const double peak = p.friction * fz;

  std::size_t checked = 0;
  double worst_ratio = 0.0;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double ratio = 0.1 + 1.8 * i / 99.0;  // Omega * R_e / V_x
      const double tan_alpha = -1.5 + 3.0 * j / 99.0;
      TireInputs in;
      in.normal_load = fz;
      in.longitudinal_velocity = 5.0;
      in.wheel_speed = 5.0 * ratio / p.radius;
      in.lateral_velocity = -tan_alpha * 5.0;
      in.turn_radius = std::numeric_limits<double>::infinity();
      const auto s = compute_slip(in, p);
      const auto f = compute_forces(s, in, p);
      worst_ratio = std::max({worst_ratio, std::abs(f.fx) / peak, std::abs(f.fy) / peak});
      ++checked;
    }
  }
  if (worst_ratio > 1.0 + 1e-12) {
    return {Verdict::kFail, "saturation violated: max |F|/(mu Fz) = " + fmt("%.12g", worst_ratio)};
  }

  // Boundary continuity: approach theta*sigma = 1 from both sides.
  const double theta = 2.0 * p.tread_stiffness * p.half_contact_length * p.half_contact_length /
                       (3.0 * p.friction * fz);
  double worst_jump = 0.0;
  double worst_mz = 0.0;
  for (double side : {1.0, -1.0}) {
    auto evaluate = [&](double u, bool lateral) {
      SlipState s;
      s.theta = s.theta_star = theta;
      const double sigma = u / theta;
      if (lateral) {
        s.sigma_y = side * sigma;
        s.tan_alpha = s.sigma_y;
      } else {
        s.sigma_x = side * sigma;
        s.kappa = s.sigma_x;
      }
      s.sigma = std::hypot(s.sigma_x, s.sigma_y);
      TireInputs in;
      in.normal_load = fz;
      return compute_forces(s, in, p);
    };
    const double below = std::nextafter(1.0, 0.0);
    const double above = std::nextafter(1.0, 2.0);
    const auto fx_in = evaluate(below, false), fx_out = evaluate(above, false);
    const auto fy_in = evaluate(below, true), fy_out = evaluate(above, true);
    worst_jump = std::max({worst_jump, std::abs(fx_in.fx - fx_out.fx) / peak,
                           std::abs(fy_in.fy - fy_out.fy) / peak});
    worst_mz = std::max(worst_mz, std::abs(fy_in.mz) / (peak * p.half_contact_length));
  }
  const double elapsed = seconds_since(t0);
  if (worst_jump > 1e-9) return {Verdict::kFail, "boundary jump " + fmt("%.3g", worst_jump)};
  if (worst_mz > 1e-9) return {Verdict::kFail, "Mz at boundary " + fmt("%.3g", worst_mz)};
  if (elapsed >= 1.0) return {Verdict::kFail, "runtime " + fmt("%.3f s", elapsed)};
  return {Verdict::kPass, std::to_string(checked) + " slip states, max |F|/(mu Fz) = " +
                              fmt("%.6f", worst_ratio) + ", boundary jump " +
                              fmt("%.2g", worst_jump) + ", " + fmt("%.3f s", elapsed)};
}

// ---------------------------------------------------------------------------

VehicleSpec random_balanced_layout(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0.1, 1.2), uy(0.1, 0.8), um(40.0, 600.0),
      uh(0.2, 1.2), usign(-1.0, 1.0);
  std::uniform_int_distribution<int> extra_pairs(0, 2), center(0, 2);
  VehicleSpec s;
  s.name = "random";
  // Mirrored pairs plus centerline wheels give equal left and right counts.
  auto add_pair = [&](double x) {
    const double y = uy(rng);
    s.wheels.push_back({x, -y, TireParams{}, false, true});
    s.wheels.push_back({x, y, TireParams{}, false, true});
  };
  add_pair(ux(rng));
  add_pair(-ux(rng));
  for (int i = extra_pairs(rng); i > 0; --i) add_pair(usign(rng) > 0 ? ux(rng) : -ux(rng));
  for (int i = center(rng); i > 0; --i) {
    s.wheels.push_back({usign(rng) > 0 ? ux(rng) : -ux(rng), 0.0, TireParams{}, false, true});
  }
  s.mass_total = um(rng);
  s.cg_height = uh(rng);
  return s;
}

Outcome load_conservation() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ua(-4.0, 4.0);
  double worst_sum = 0.0, worst_moment = 0.0;
  std::size_t samples = 0;
  while (samples < 1000) {
    const auto spec = random_balanced_layout(rng);
    spec.validate();
    double ax = ua(rng), ay = ua(rng);
    auto loads = compute_load_distribution(spec, ax, ay);
    for (int shrink = 0; shrink < 40 && loads.lift_count() > 0; ++shrink) {
      ax *= 0.7;
      ay *= 0.7;
      loads = compute_load_distribution(spec, ax, ay);
    }
    if (loads.lift_count() > 0) continue;
    double sum = 0.0;
    for (double f : loads.fz) sum += f;
    const double weight = spec.mass_total * kGravity;
    worst_sum = std::max(worst_sum, std::abs(sum - weight) / weight);

    const auto rest = compute_load_distribution(spec, 0.0, 0.0);
    double moment = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < spec.wheels.size(); ++i) {
      moment += rest.fz[i] * spec.wheels[i].x;
      scale += rest.fz[i] * std::abs(spec.wheels[i].x);
    }
    worst_moment = std::max(worst_moment, std::abs(moment) / scale);
    ++samples;
  }
  const double elapsed = seconds_since(t0);
  const std::string detail = std::to_string(samples) + " samples, max rel. load error " +
                             fmt("%.2g", worst_sum) + ", max rel. moment " +
                             fmt("%.2g", worst_moment) + ", " + fmt("%.3f s", elapsed);
  if (worst_sum > 1e-9 || worst_moment > 1e-9 || elapsed >= 1.0) return {Verdict::kFail, detail};
  return {Verdict::kPass, detail};
}

// ---------------------------------------------------------------------------

Outcome skateboard_geometry() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lean(-0.6, 0.6), beta(0.1, 1.4), gain(0.1, 2.0);
  std::size_t n = 0;
  double worst = 0.0;
  for (; n < 10000; ++n) {
    const double phi = lean(rng), b = beta(rng), k = gain(rng);
    const auto t = skateboard_steer(phi, b, k);
    if (t.front != -t.rear) return {Verdict::kFail, "front != -rear at lean " + fmt("%.6g", phi)};
    const double direct = k * phi * std::sin(b);
    worst = std::max(worst, std::abs(t.front - direct));
  }
  // Through the layout pipeline: every front truck wheel mirrors the rear.
  auto spec = make_skateboard();
  for (double phi = -spec.max_lean; phi <= spec.max_lean; phi += 0.01) {
    const auto d = resolve_steer_angles(spec, phi);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < d.size(); ++j) {
        if (spec.wheels[i].x > 0 && spec.wheels[j].x <= 0 && d[i] != -d[j]) {
          return {Verdict::kFail, "layout truck angles not antisymmetric"};
        }
      }
    }
  }
  if (worst > 1e-15) return {Verdict::kFail, "max deviation " + fmt("%.3g", worst)};
  return {Verdict::kPass, std::to_string(n) + " random (lean, beta, k), max deviation " +
                              fmt("%.2g", worst)};
}

// ---------------------------------------------------------------------------

using Vec3 = std::array<double, 3>;

Vec3 pendulum(const Vec3& s) {
  return {s[1], -std::sin(s[0]) - 0.2 * s[1] + 0.5 * std::cos(s[2]), 1.0};
}

template <typename State, typename F>
State integrate_rk4(F f, State s, double dt, double t_end) {
  const auto steps = static_cast<int>(std::lround(t_end / dt));
  for (int k = 0; k < steps; ++k) s = rk4_step(f, s, dt);
  return s;
}

Outcome rk4_order() {
  const auto t0 = Clock::now();
  const double t_end = 2.0;
  const double dts[] = {0.02, 0.01, 0.005};

  // Exponential: closed form.
  std::vector<double> exp_err;
  for (double dt : dts) {
    const double s = integrate_rk4([](double x) { return x; }, 1.0, dt, t_end);
    exp_err.push_back(std::abs(s - std::exp(t_end)));
  }
  // Forced damped pendulum: high-accuracy adaptive Dormand-Prince reference.
  namespace ode = boost::numeric::odeint;
  Vec3 ref{1.0, 0.0, 0.0};
  ode::integrate_adaptive(ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<Vec3>()),
                          [](const Vec3& x, Vec3& dxdt, double) { dxdt = pendulum(x); }, ref,
                          0.0, t_end, 1e-4);
  std::vector<double> pen_err;
  for (double dt : dts) {
    const auto s = integrate_rk4(pendulum, Vec3{1.0, 0.0, 0.0}, dt, t_end);
    pen_err.push_back(std::hypot(s[0] - ref[0], s[1] - ref[1]));
  }
  double min_order = 1e9;
  std::ostringstream d;
  for (const auto* errs : {&exp_err, &pen_err}) {
    for (std::size_t i = 0; i + 1 < errs->size(); ++i) {
      const double order = std::log2((*errs)[i] / (*errs)[i + 1]);
      min_order = std::min(min_order, order);
      d << fmt("%.3f", order) << ' ';
    }
  }
  const double elapsed = seconds_since(t0);
  const std::string detail = "observed orders " + d.str() + "(min " + fmt("%.3f", min_order) +
                             "), " + fmt("%.3f s", elapsed);
  if (min_order < 3.8 || elapsed >= 5.0) return {Verdict::kFail, detail};
  return {Verdict::kPass, detail};
}

// ---------------------------------------------------------------------------

Outcome kbm_circle() {
  const auto spec = make_bicycle();
  const double l = spec.wheelbase();
  const double delta = 0.2, v = 2.0, dt = 0.001;
  const double expected = l / std::tan(delta);
  const double period = 2.0 * M_PI * expected / v;
  const auto steps = static_cast<int>(std::ceil(period / dt));
  KbmModel kbm;
  ModelCommand cmd;
  cmd.steer_or_lean = delta;
  cmd.longitudinal = AccelerationCommand{0.0};
  VehicleState s;
  s.vx = v;
  std::vector<Point2> pts{{s.x, s.y}};
  for (int k = 0; k < steps; ++k) {
    s = model_step(kbm, spec, s, cmd, dt);
    pts.push_back({s.x, s.y});
  }
  const double fitted = oracle::fit_circle_radius(pts);
  double worst_point = 0.0;
  for (const auto& p : pts) {
    worst_point = std::max(worst_point, std::abs(std::hypot(p.x, p.y - expected) - expected));
  }
  const double rel = std::abs(fitted - expected) / expected;
  const std::string detail = "L/tan(delta) = " + fmt("%.6f", expected) + " m, fitted " +
                             fmt("%.6f", fitted) + " m (rel. " + fmt("%.2g", rel) +
                             "), max point deviation " + fmt("%.2g m", worst_point);
  if (rel > 1e-3 || worst_point / expected > 1e-3) return {Verdict::kFail, detail};
  return {Verdict::kPass, detail};
}

// ---------------------------------------------------------------------------

Outcome low_speed_consistency() {
  const auto spec = make_bicycle();
  const double re = spec.wheels[1].tire.effective_rolling_radius();
  const auto gm3 = ModelRegistry::instance().get("gm3");
  const auto kbm = ModelRegistry::instance().get("kbm");
  const double dt = 0.005;
  double worst = 0.0;
  std::ostringstream d;
  for (double v : {0.5, 1.0, 2.0}) {
    for (double delta : {-0.1, 0.05, 0.1}) {
      VehicleState cg;
      cg.vx = v;
      auto sg = gm3->from_cg_state(spec, cg);
      auto sk = kbm->from_cg_state(spec, cg);
      ModelCommand cg3{delta, WheelSpeedCommand{v / re}, 0.0};
      ModelCommand ckb{delta, AccelerationCommand{0.0}, 0.0};
      std::vector<Point2> pg{{0, 0}}, pk{{0, 0}};
      for (int k = 0; k < static_cast<int>(std::lround(5.0 / dt)); ++k) {
        sg = model_step(*gm3, spec, sg, cg3, dt);
        sk = model_step(*kbm, spec, sk, ckb, dt);
        const auto a = gm3->cg_position(spec, sg);
        const auto b = kbm->cg_position(spec, sk);
        pg.push_back({a.x, a.y});
        pk.push_back({b.x, b.y});
      }
      double length = 0.0;
      for (std::size_t i = 1; i < pk.size(); ++i) {
        length += std::hypot(pk[i].x - pk[i - 1].x, pk[i].y - pk[i - 1].y);
      }
      const double ratio = ade(pg, pk) / length;
      worst = std::max(worst, ratio);
    }
  }
  const std::string detail = "bicycle, v in {0.5,1,2} m/s, delta in {-0.1,0.05,0.1} rad, 5 s: "
                             "max ADE / path length = " + fmt("%.4f", worst);
  if (worst > 0.05) return {Verdict::kFail, detail};
  return {Verdict::kPass, detail};
}

// ---------------------------------------------------------------------------

Outcome metric_oracles() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::size_t mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<Point2> p(static_cast<std::size_t>(len(rng))), q(static_cast<std::size_t>(len(rng)));
    for (auto& pt : p) pt = {coord(rng), coord(rng)};
    for (auto& pt : q) pt = {coord(rng), coord(rng)};
    if (discrete_frechet(p, q) != oracle::frechet_brute_force(p, q)) ++mismatches;
  }
  const std::vector<Point2> a{{0, 0}, {0, 0}}, b{{3, 4}, {0, 0}};
  const double hand = ade(a, b);
  const std::string detail = "1000 random pairs (length <= 8): " + std::to_string(mismatches) +
                             " mismatches; ADE hand case = " + fmt("%.17g", hand);
  if (mismatches != 0 || hand != 2.5) return {Verdict::kFail, detail};
  return {Verdict::kPass, detail};
}

// ---------------------------------------------------------------------------

struct TableRow {
  const char* mode;
  double ade_gm3, ade_kbm, dfd_gm3, dfd_kbm;
};
constexpr TableRow kTable[] = {{"biker", 45.109, 47.564, 66.108, 59.257},
                               {"skater", 45.628, 50.016, 55.005, 58.575},
                               {"cart", 44.270, 47.512, 52.263, 53.515}};

std::optional<fs::path> find_dataset() {
  if (const char* env = std::getenv("GM3_SDD_DIR"); env && *env) return fs::path(env);
  for (const auto& p : {source_root() / "data" / "sdd", source_root() / "data" / "stanford_drone"}) {
    if (fs::is_directory(p)) return p;
  }
  return std::nullopt;
}

Outcome table_iii() {
  // Bundled mini-fixture: runtime bound, always checked.
  const auto t0 = Clock::now();
  EvaluationOptions mini;
  mini.calibration_file = source_root() / "data" / "sdd_mini" / "scales.yaml";
  MetricsReport mini_report;
  try {
    mini_report = evaluate_modes(source_root() / "data" / "sdd_mini", default_mode_configs(), mini);
  } catch (const std::exception& e) {
    return {Verdict::kFail, std::string("mini-fixture failed: ") + e.what()};
  }
  const double mini_s = seconds_since(t0);
  std::size_t scored = mini_report.per_track.size();
  const std::string mini_note = "mini-fixture " + std::to_string(scored) + " tracks in " +
                                fmt("%.2f s", mini_s);
  if (mini_s >= 30.0 || scored != 10) return {Verdict::kFail, mini_note};

  const auto root = find_dataset();
  if (!root) {
    return {Verdict::kSkipped,
            "deathCircle annotations not found (set GM3_SDD_DIR); " + mini_note};
  }
  EvaluationOptions opt;
  if (const char* scales = std::getenv("GM3_SDD_SCALES"); scales && *scales) {
    opt.calibration_file = fs::path(scales);
  } else {
    opt.calibration_file = *root / "estimated_scales.yaml";
  }
  MetricsReport report;
  try {
    report = evaluate_modes(*root, default_mode_configs(), opt);
  } catch (const std::exception& e) {
    return {Verdict::kFail, std::string("dataset evaluation failed: ") + e.what()};
  }
  std::ostringstream d;
  bool ok = true;
  for (const auto& row : kTable) {
    const auto it = std::find_if(report.per_mode.begin(), report.per_mode.end(),
                                 [&](const ModeMetrics& m) { return m.mode == row.mode; });
    if (it == report.per_mode.end()) {
      ok = false;
      d << row.mode << ": no tracks; ";
      continue;
    }
    const bool ade_dir = it->ade_gm3 < it->ade_kbm;
    const bool dfd_dir = (it->dfd_gm3 < it->dfd_kbm) == (row.dfd_gm3 < row.dfd_kbm);
    const bool mag = std::abs(it->ade_gm3 - row.ade_gm3) <= 0.5 * row.ade_gm3 &&
                     std::abs(it->ade_kbm - row.ade_kbm) <= 0.5 * row.ade_kbm;
    ok = ok && ade_dir && dfd_dir && mag;
    d << row.mode << " ADE " << fmt("%.3f", it->ade_gm3) << "/" << fmt("%.3f", it->ade_kbm)
      << " DFD " << fmt("%.3f", it->dfd_gm3) << "/" << fmt("%.3f", it->dfd_kbm)
      << (ade_dir ? "" : " [ADE order]") << (dfd_dir ? "" : " [DFD order]")
      << (mag ? "" : " [ADE magnitude]") << "; ";
  }
  return {ok ? Verdict::kPass : Verdict::kFail, d.str() + mini_note};
}

// ---------------------------------------------------------------------------

Outcome determinism() {
  std::ostringstream d;
  for (const char* name : {"bicycle_slalom.yaml", "skateboard_carve.yaml", "cart_circle.yaml"}) {
    const auto path = source_root() / "scripts" / name;
    auto script = load_script(path);
    for (const char* model : {"gm3", "kbm"}) {
      script.model_type = model;
      const auto cfg = load_vehicle_config(resolve_vehicle_config(script.vehicle_kind),
                                           script.param_overrides);
      const auto a = to_csv(run_script(script, cfg));
      const auto b = to_csv(run_script(script, cfg));
      if (a != b) return {Verdict::kFail, std::string(name) + " / " + model + " differs"};
    }
  }
  return {Verdict::kPass, "3 scripts x 2 models, CSV logs byte-identical across repeat runs"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"Brush-model curve suite", brush_curve_suite},
      {"Load-transfer conservation", load_conservation},
      {"Skateboard geometry", skateboard_geometry},
      {"RK4 order check", rk4_order},
      {"KBM circle", kbm_circle},
      {"GM3-KBM low-speed consistency", low_speed_consistency},
      {"Metric oracles", metric_oracles},
      {"Table III directionality", table_iii},
      {"Determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kFail ? "FAIL" : "SKIPPED";
    if (o.verdict == Verdict::kFail) ++failures;
    std::printf("%-8s %s: %s\n", tag, c.name, o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
