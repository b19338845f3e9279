#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gm3/metrics.hpp"

namespace gm3 {

// One line of a drone-dataset annotation file:
//   track_id xmin ymin xmax ymax frame lost occluded generated "label"
struct AnnotationRecord {
  long track_id = 0;
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;
  long frame = 0;
  bool lost = false;
  bool occluded = false;
  bool generated = false;
  std::string label;
};

struct AnnotationIssue {
  std::size_t line = 0;
  std::string message;
};

struct ParsedAnnotations {
  std::vector<AnnotationRecord> records;
  std::vector<AnnotationIssue> issues;  // malformed rows, skipped
};

ParsedAnnotations parse_annotations(std::istream& in);

struct IngestOptions {
  double scale_m_per_px = 1.0;
  double fps = 30.0;
  int max_gap_frames = 3;  // longer runs of missing frames split a track
  std::string track_prefix;  // prepended to track ids (e.g. "video0:")
};

struct IngestResult {
  std::vector<Trajectory> trajectories;
  std::vector<AnnotationIssue> issues;
  std::size_t discarded_short = 0;  // segments with a single sample
};

// Maps an annotation label to a micro-mobility mode ("biker", "skater",
// "cart"); empty for every other class.
std::string mode_for_label(const std::string& label);

// Bottom-midpoint of each box scaled to meters, lost frames dropped, tracks
// split at long gaps and linearly resampled over short ones to a uniform
// 1/fps step. Only micro-mobility labels are kept.
IngestResult build_trajectories(const std::vector<AnnotationRecord>& records,
                                const IngestOptions& options);

// Throws DataError when nothing usable remains or the file cannot be read.
IngestResult ingest_annotations(const std::filesystem::path& file, double scale_m_per_px,
                                double fps, const std::string& track_prefix = {});

}  // namespace gm3
