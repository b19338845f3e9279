#include "gm3/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "gm3/annotations.hpp"
#include "gm3/config.hpp"
#include "gm3/errors.hpp"

namespace gm3 {
namespace fs = std::filesystem;

ModeConfigs default_mode_configs(const fs::path& config_dir) {
  ModeConfigs out;
  const std::pair<const char*, const char*> table[] = {
      {"biker", "bicycle"}, {"skater", "skateboard"}, {"cart", "cart"}};
  for (const auto& [mode, vehicle] : table) {
    out[mode] = load_vehicle_config(resolve_vehicle_config(vehicle, config_dir));
  }
  return out;
}

MetricsReport evaluate_trajectories(const std::vector<Trajectory>& tracks,
                                    const ModeConfigs& configs,
                                    const ReconstructionOptions& options) {
  const auto gm3 = ModelRegistry::instance().get("gm3");
  const auto kbm = ModelRegistry::instance().get("kbm");

  std::vector<const Trajectory*> order;
  for (const auto& t : tracks) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const Trajectory* a, const Trajectory* b) {
    return std::tie(a->mode, a->track_id) < std::tie(b->mode, b->track_id);
  });

  MetricsReport report;
  for (const auto* track : order) {
    const auto cfg = configs.find(track->mode);
    if (cfg == configs.end()) continue;
    try {
      if (median_speed(*track) < options.min_median_speed) {
        report.excluded.push_back({track->track_id, track->mode, "median speed below threshold"});
        continue;
      }
      const auto sim_gm3 = simulate_track(*track, cfg->second, gm3, options);
      const auto sim_kbm = simulate_track(*track, cfg->second, kbm, options);
      TrackMetrics m;
      m.track_id = track->track_id;
      m.mode = track->mode;
      m.samples = track->points.size();
      m.ade_gm3 = ade(sim_gm3, *track);
      m.ade_kbm = ade(sim_kbm, *track);
      m.dfd_gm3 = discrete_frechet(sim_gm3, *track);
      m.dfd_kbm = discrete_frechet(sim_kbm, *track);
      report.per_track.push_back(std::move(m));
    } catch (const std::exception& e) {
      report.excluded.push_back({track->track_id, track->mode, e.what()});
    }
  }

  std::map<std::string, ModeMetrics> sums;
  for (const auto& m : report.per_track) {
    auto& s = sums[m.mode];
    s.mode = m.mode;
    ++s.tracks;
    s.ade_gm3 += m.ade_gm3;
    s.ade_kbm += m.ade_kbm;
    s.dfd_gm3 += m.dfd_gm3;
    s.dfd_kbm += m.dfd_kbm;
  }
  for (auto& [mode, s] : sums) {
    const double n = static_cast<double>(s.tracks);
    s.ade_gm3 /= n;
    s.ade_kbm /= n;
    s.dfd_gm3 /= n;
    s.dfd_kbm /= n;
    report.per_mode.push_back(s);
  }

  report.metadata["smoothing_window"] = std::to_string(options.smoothing_window);
  report.metadata["min_median_speed"] = std::to_string(options.min_median_speed);
  report.metadata["slow_speed"] = std::to_string(options.slow_speed);
  report.metadata["substeps"] = std::to_string(options.substeps);
  report.metadata["aggregation"] = "mean over tracks";
  return report;
}

std::map<std::string, fs::path> discover_annotations(const fs::path& dataset_dir,
                                                     const std::string& scene) {
  if (!fs::is_directory(dataset_dir)) {
    throw DataError("dataset directory '" + dataset_dir.string() + "' does not exist");
  }
  std::map<std::string, fs::path> out;
  auto scan_scene = [&](const fs::path& scene_dir) {
    if (!fs::is_directory(scene_dir)) return;
    for (const auto& e : fs::directory_iterator(scene_dir)) {
      const auto file = e.path() / "annotations.txt";
      if (e.is_directory() && fs::is_regular_file(file)) out[e.path().filename().string()] = file;
    }
  };
  if (fs::is_regular_file(dataset_dir / "annotations.txt")) {
    out[dataset_dir.filename().string()] = dataset_dir / "annotations.txt";
    return out;
  }
  scan_scene(dataset_dir / "annotations" / scene);
  if (out.empty()) scan_scene(dataset_dir / scene);
  if (out.empty()) scan_scene(dataset_dir);
  return out;
}

std::map<std::string, double> load_scales(const fs::path& file, const std::string& scene) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(file.string());
  } catch (const YAML::Exception& e) {
    throw DataError("cannot read scale file '" + file.string() + "': " + e.what());
  }
  const auto node = root[scene];
  if (!node || !node.IsMap()) {
    throw DataError("scale file '" + file.string() + "' has no entry for scene '" + scene + "'");
  }
  std::map<std::string, double> out;
  for (const auto& kv : node) {
    const auto video = kv.first.as<std::string>();
    try {
      const double s = kv.second.IsMap() ? kv.second["scale"].as<double>() : kv.second.as<double>();
      if (!(s > 0.0)) throw DataError("non-positive scale");
      out[video] = s;
    } catch (const std::exception&) {
      throw DataError("scale file '" + file.string() + "': bad scale for " + scene + "/" + video);
    }
  }
  return out;
}

MetricsReport evaluate_modes(const fs::path& dataset_dir, const ModeConfigs& configs,
                             const EvaluationOptions& options) {
  const auto files = discover_annotations(dataset_dir, options.scene);
  if (files.empty()) {
    throw DataError("no annotation files for scene '" + options.scene + "' under '" +
                    dataset_dir.string() + "'");
  }
  std::map<std::string, double> scales;
  if (!options.scale_m_per_px) {
    if (!options.calibration_file) {
      throw DataError("a pixel-to-meter scale or a calibration file is required");
    }
    scales = load_scales(*options.calibration_file, options.scene);
  }

  const std::set<std::string> wanted(options.modes.begin(), options.modes.end());
  ModeConfigs selected;
  for (const auto& m : wanted) {
    const auto it = configs.find(m);
    if (it == configs.end()) throw ConfigError("no vehicle config for mode '" + m + "'");
    selected.insert(*it);
  }

  std::vector<Trajectory> tracks;
  std::size_t issues = 0;
  for (const auto& [video, file] : files) {
    double scale = 0.0;
    if (options.scale_m_per_px) {
      scale = *options.scale_m_per_px;
    } else {
      const auto it = scales.find(video);
      if (it == scales.end()) throw DataError("no scale for " + options.scene + "/" + video);
      scale = it->second;
    }
    IngestResult ingested;
    try {
      ingested = ingest_annotations(file, scale, options.fps, video + ":");
    } catch (const DataError&) {
      continue;  // a video without micro-mobility tracks
    }
    issues += ingested.issues.size();
    for (auto& t : ingested.trajectories) {
      if (wanted.count(t.mode)) tracks.push_back(std::move(t));
    }
  }
  if (options.max_tracks_per_mode) {
    std::sort(tracks.begin(), tracks.end(), [](const Trajectory& a, const Trajectory& b) {
      return std::tie(a.mode, a.track_id) < std::tie(b.mode, b.track_id);
    });
    std::map<std::string, std::size_t> count;
    std::vector<Trajectory> kept;
    for (auto& t : tracks) {
      if (count[t.mode]++ < *options.max_tracks_per_mode) kept.push_back(std::move(t));
    }
    tracks = std::move(kept);
  }
  if (tracks.empty()) throw DataError("no tracks of the requested modes in the dataset");

  auto report = evaluate_trajectories(tracks, selected, options.reconstruction);
  report.metadata["scene"] = options.scene;
  report.metadata["fps"] = std::to_string(options.fps);
  report.metadata["videos"] = std::to_string(files.size());
  report.metadata["annotation_issues"] = std::to_string(issues);
  if (options.scale_m_per_px) report.metadata["scale_m_per_px"] = std::to_string(*options.scale_m_per_px);
  for (const auto& [mode, cfg] : selected) {
    report.metadata["vehicle." + mode] = cfg.spec.name + " " + spec_hash(cfg.spec);
  }
  return report;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

std::string format_table(const MetricsReport& report) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(3);
  o << std::left << std::setw(10) << "" << std::right << std::setw(21) << "ADE (m)" << "   "
    << std::setw(21) << "DFD (m)" << '\n';
  o << std::left << std::setw(10) << "Mode" << std::right << std::setw(10) << "GM3" << ' '
    << std::setw(10) << "KBM" << "   " << std::setw(10) << "GM3" << ' ' << std::setw(10) << "KBM"
    << std::setw(9) << "tracks" << '\n';
  for (const auto& m : report.per_mode) {
    o << std::left << std::setw(10) << capitalized(m.mode) << std::right << std::setw(10)
      << m.ade_gm3 << ' ' << std::setw(10) << m.ade_kbm << "   " << std::setw(10) << m.dfd_gm3
      << ' ' << std::setw(10) << m.dfd_kbm << std::setw(9) << m.tracks << '\n';
  }
  if (!report.excluded.empty()) o << "excluded tracks: " << report.excluded.size() << '\n';
  return o.str();
}

void write_report(const MetricsReport& report, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::string per_track = "track_id,mode,samples,ade_gm3,ade_kbm,dfd_gm3,dfd_kbm\n";
  for (const auto& m : report.per_track) {
    per_track += csv_field(m.track_id) + ',' + m.mode + ',' + std::to_string(m.samples) + ',' +
                 num(m.ade_gm3) + ',' + num(m.ade_kbm) + ',' + num(m.dfd_gm3) + ',' +
                 num(m.dfd_kbm) + '\n';
  }
  std::string per_mode = "mode,tracks,ade_gm3,ade_kbm,dfd_gm3,dfd_kbm\n";
  for (const auto& m : report.per_mode) {
    per_mode += m.mode + ',' + std::to_string(m.tracks) + ',' + num(m.ade_gm3) + ',' +
                num(m.ade_kbm) + ',' + num(m.dfd_gm3) + ',' + num(m.dfd_kbm) + '\n';
  }
  std::string excluded = "track_id,mode,reason\n";
  for (const auto& e : report.excluded) {
    excluded += csv_field(e.track_id) + ',' + e.mode + ',' + csv_field(e.reason) + '\n';
  }
  nlohmann::json meta(report.metadata);
  meta["tracks_scored"] = report.per_track.size();
  meta["tracks_excluded"] = report.excluded.size();

  write_file(out_dir / "per_track.csv", per_track);
  write_file(out_dir / "per_mode.csv", per_mode);
  write_file(out_dir / "excluded.csv", excluded);
  write_file(out_dir / "metadata.json", meta.dump(2) + "\n");
  write_file(out_dir / "table.txt", format_table(report));
}

}  // namespace gm3
