#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gm3/metrics.hpp"
#include "gm3/reconstruct.hpp"
#include "gm3/simulator.hpp"

namespace gm3 {

struct TrackMetrics {
  std::string track_id;
  std::string mode;
  std::size_t samples = 0;
  double ade_gm3 = 0.0;
  double ade_kbm = 0.0;
  double dfd_gm3 = 0.0;
  double dfd_kbm = 0.0;
};

struct ModeMetrics {
  std::string mode;
  std::size_t tracks = 0;
  double ade_gm3 = 0.0;
  double ade_kbm = 0.0;
  double dfd_gm3 = 0.0;
  double dfd_kbm = 0.0;
};

struct ExcludedTrack {
  std::string track_id;
  std::string mode;
  std::string reason;
};

struct MetricsReport {
  std::vector<TrackMetrics> per_track;  // sorted by (mode, track_id)
  std::vector<ModeMetrics> per_mode;    // arithmetic means over per_track rows
  std::vector<ExcludedTrack> excluded;
  std::map<std::string, std::string> metadata;
};

// Per-mode vehicle configs for the three micro-mobility classes.
using ModeConfigs = std::map<std::string, VehicleConfig>;

// bicycle, skateboard and cart configs from the shipped config directory.
ModeConfigs default_mode_configs(const std::filesystem::path& config_dir = {});

// Scores already-ingested tracks. Tracks whose mode has no config are
// ignored; slow tracks and replay failures are excluded and listed.
MetricsReport evaluate_trajectories(const std::vector<Trajectory>& tracks,
                                    const ModeConfigs& configs,
                                    const ReconstructionOptions& options = {});

struct EvaluationOptions {
  std::string scene = "deathCircle";
  std::vector<std::string> modes{"biker", "skater", "cart"};
  std::optional<double> scale_m_per_px;  // wins over the calibration file
  std::optional<std::filesystem::path> calibration_file;
  double fps = 30.0;
  ReconstructionOptions reconstruction;
  std::optional<std::size_t> max_tracks_per_mode;
};

// Annotation files of a scene, keyed by video name. Accepts the dataset
// root (annotations/<scene>/<video>/annotations.txt), a scene directory or
// a single video directory.
std::map<std::string, std::filesystem::path> discover_annotations(
    const std::filesystem::path& dataset_dir, const std::string& scene);

// Per-video scales from a YAML file shaped like
//   <scene>: { <video>: { scale: <m/px> } }  or  <scene>: { <video>: <m/px> }
std::map<std::string, double> load_scales(const std::filesystem::path& file,
                                          const std::string& scene);

// Throws DataError if the dataset directory is missing or holds no
// annotations for the scene.
MetricsReport evaluate_modes(const std::filesystem::path& dataset_dir, const ModeConfigs& configs,
                             const EvaluationOptions& options = {});

// Writes per_track.csv, per_mode.csv, excluded.csv, metadata.json and
// table.txt into `out_dir` (created if needed).
void write_report(const MetricsReport& report, const std::filesystem::path& out_dir);

// Fixed-width text table: one row per mode, ADE and DFD for both models.
std::string format_table(const MetricsReport& report);

}  // namespace gm3
