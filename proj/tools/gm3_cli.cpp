#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gm3/config.hpp"
#include "gm3/csv_log.hpp"
#include "gm3/errors.hpp"
#include "gm3/evaluation.hpp"
#include "gm3/simulator.hpp"
#ifdef GM3_HAVE_SERVER
#include "gm3/server.hpp"
#endif

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int simulate(const fs::path& script_path, const std::string& model, const std::string& vehicle,
             double dt, const fs::path& out, const fs::path& config_dir) {
  auto script = gm3::load_script(script_path);
  if (!model.empty()) script.model_type = model;
  if (!vehicle.empty()) script.vehicle_kind = vehicle;
  if (script.vehicle_kind.empty()) throw gm3::ConfigError("no vehicle given in script or --vehicle");
  gm3::ModelRegistry::instance().get(script.model_type);

  // Relative vehicle paths in a script are taken from the script's directory.
  const auto beside_script = script_path.parent_path() / script.vehicle_kind;
  const fs::path vehicle_path = fs::is_regular_file(beside_script)
                                    ? beside_script
                                    : gm3::resolve_vehicle_config(script.vehicle_kind, config_dir);
  auto config = gm3::load_vehicle_config(vehicle_path, script.param_overrides);
  if (const auto sdt = gm3::script_dt(script_path)) config.dt = *sdt;
  if (dt > 0.0) config.dt = dt;

  const auto log = gm3::run_script(script, config);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  gm3::export_csv(log, out);
  auto meta_path = out;
  meta_path.replace_extension(".meta.json");
  gm3::export_metadata(log.metadata, meta_path);
  std::cout << "wrote " << log.rows.size() << " rows to " << out.string() << '\n';
  if (log.metadata.error) {
    std::cerr << "integration fault: " << *log.metadata.error << '\n';
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Micro-mobility vehicle simulator"};
  app.require_subcommand(1);
  std::string config_dir;
  app.add_option("--config-dir", config_dir, "Directory of vehicle configs");

  auto* sim = app.add_subcommand("simulate", "Run a control script and export the log as CSV");
  std::string script, sim_model, sim_vehicle, sim_out;
  double sim_dt = 0.0;
  sim->add_option("--script", script, "Control script (YAML)")->required()->check(CLI::ExistingFile);
  sim->add_option("--model", sim_model, "Model id (gm3 or kbm); overrides the script")
      ->check(CLI::IsMember({"gm3", "kbm"}));
  sim->add_option("--vehicle", sim_vehicle, "Vehicle config id or path; overrides the script");
  sim->add_option("--dt", sim_dt, "Integrator step [s]")->check(CLI::PositiveNumber);
  sim->add_option("--out", sim_out, "Output CSV path")->required();

  auto* demo = app.add_subcommand("demo", "Serve interactive sessions over WebSocket");
  std::string demo_vehicle = "bicycle", demo_model = "gm3";
  int demo_port = -1;
  demo->add_option("--vehicle", demo_vehicle, "Default vehicle config id or path");
  demo->add_option("--model", demo_model, "Default model id");
  demo->add_option("--port", demo_port, "Port (default $GM3_SIM_PORT or 8731)")
      ->check(CLI::Range(0, 65535));

  auto* eval = app.add_subcommand("evaluate", "Replay dataset tracks with GM3 and KBM and score them");
  std::string dataset, scene = "deathCircle", modes = "biker,skater,cart", eval_out, calibration;
  double scale = 0.0;
  int substeps = 6, window = 5;
  double min_speed = 0.1;
  std::size_t max_tracks = 0;
  eval->add_option("--dataset", dataset, "Dataset root, scene or video directory")->required();
  eval->add_option("--scene", scene, "Scene name");
  eval->add_option("--modes", modes, "Comma-separated modes (biker,skater,cart)");
  auto* scale_opt = eval->add_option("--scale", scale, "Pixel-to-meter scale [m/px]")
                        ->check(CLI::PositiveNumber);
  eval->add_option("--calibration", calibration, "Per-video scale file (YAML)")
      ->excludes(scale_opt)
      ->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Report directory")->required();
  eval->add_option("--substeps", substeps, "Integrator steps per frame")->check(CLI::PositiveNumber);
  eval->add_option("--smoothing-window", window, "Odd smoothing window [samples]");
  eval->add_option("--min-median-speed", min_speed, "Exclusion threshold [m/s]");
  eval->add_option("--max-tracks", max_tracks, "Limit tracks per mode (0 = all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(script, sim_model, sim_vehicle, sim_dt, sim_out, config_dir);

    if (*demo) {
#ifdef GM3_HAVE_SERVER
      gm3::ModelRegistry::instance().get(demo_model);
      gm3::load_vehicle_config(gm3::resolve_vehicle_config(demo_vehicle, config_dir));
      gm3::ServerOptions opt;
      opt.port = demo_port >= 0 ? static_cast<std::uint16_t>(demo_port) : gm3::server_port_from_env();
      opt.config_dir = config_dir;
      opt.defaults.vehicle = demo_vehicle;
      opt.defaults.model = demo_model;
      gm3::Server server(opt);
      server.start();
      std::cout << "serving " << demo_vehicle << " (" << demo_model << ") on ws://localhost:"
                << server.port() << std::endl;
      server.run(true);
      return 0;
#else
      std::cerr << "built without the session server\n";
      return 2;
#endif
    }

    gm3::EvaluationOptions opt;
    opt.scene = scene;
    opt.modes = split(modes, ',');
    if (scale > 0.0) opt.scale_m_per_px = scale;
    if (!calibration.empty()) opt.calibration_file = calibration;
    opt.reconstruction.substeps = substeps;
    opt.reconstruction.smoothing_window = window;
    opt.reconstruction.min_median_speed = min_speed;
    if (max_tracks > 0) opt.max_tracks_per_mode = max_tracks;
    const auto report = gm3::evaluate_modes(dataset, gm3::default_mode_configs(config_dir), opt);
    gm3::write_report(report, eval_out);
    std::cout << gm3::format_table(report);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
