#include "gm3/annotations.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gm3/errors.hpp"

namespace gm3 {
namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

bool parse_flag(const std::string& s, bool& out) {
  if (s == "0") {
    out = false;
    return true;
  }
  if (s == "1") {
    out = true;
    return true;
  }
  return false;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  std::istringstream ss(s);
  ss >> out;
  return ss && ss.peek() == std::char_traits<char>::eof();
}

}  // namespace

ParsedAnnotations parse_annotations(std::istream& in) {
  ParsedAnnotations out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream ss(line);
    std::vector<std::string> f;
    std::string tok;
    while (ss >> tok) f.push_back(tok);
    // Labels may contain spaces when quoted.
    if (f.size() > 10) {
      for (std::size_t i = 10; i < f.size(); ++i) f[9] += " " + f[i];
      f.resize(10);
    }
    auto bad = [&](const std::string& why) { out.issues.push_back({line_no, why}); };
    if (f.size() != 10) {
      bad("expected 10 fields, found " + std::to_string(f.size()));
      continue;
    }
    AnnotationRecord r;
    if (!parse_number(f[0], r.track_id) || !parse_number(f[1], r.xmin) ||
        !parse_number(f[2], r.ymin) || !parse_number(f[3], r.xmax) ||
        !parse_number(f[4], r.ymax) || !parse_number(f[5], r.frame)) {
      bad("non-numeric id, box or frame field");
      continue;
    }
    if (!parse_flag(f[6], r.lost) || !parse_flag(f[7], r.occluded) ||
        !parse_flag(f[8], r.generated)) {
      bad("lost/occluded/generated flags must be 0 or 1");
      continue;
    }
    if (r.xmax < r.xmin || r.ymax < r.ymin) {
      bad("bounding box has max < min");
      continue;
    }
    if (!std::isfinite(r.xmin) || !std::isfinite(r.ymin) || !std::isfinite(r.xmax) ||
        !std::isfinite(r.ymax)) {
      bad("non-finite bounding box");
      continue;
    }
    r.label = unquote(f[9]);
    out.records.push_back(std::move(r));
  }
  return out;
}

std::string mode_for_label(const std::string& label) {
  const auto l = lower(label);
  if (l == "biker") return "biker";
  if (l == "skater") return "skater";
  if (l == "cart") return "cart";
  return {};
}

IngestResult build_trajectories(const std::vector<AnnotationRecord>& records,
                                const IngestOptions& opt) {
  if (!(opt.scale_m_per_px > 0.0)) throw DataError("pixel-to-meter scale must be positive");
  if (!(opt.fps > 0.0)) throw DataError("frame rate must be positive");

  // track id -> frame -> record (first occurrence wins)
  std::map<long, std::map<long, const AnnotationRecord*>> tracks;
  std::map<long, std::string> track_mode;
  IngestResult out;
  for (const auto& r : records) {
    const auto mode = mode_for_label(r.label);
    if (mode.empty() || r.lost) continue;
    auto& frames = tracks[r.track_id];
    if (!frames.emplace(r.frame, &r).second) {
      out.issues.push_back({0, "duplicate frame " + std::to_string(r.frame) + " in track " +
                                   std::to_string(r.track_id)});
    }
    track_mode.emplace(r.track_id, mode);
  }

  const double step = 1.0 / opt.fps;
  for (const auto& [id, frames] : tracks) {
    std::vector<std::vector<std::pair<long, const AnnotationRecord*>>> segments(1);
    long prev_frame = 0;
    for (const auto& [frame, rec] : frames) {
      if (!segments.back().empty() && frame - prev_frame - 1 > opt.max_gap_frames) {
        segments.emplace_back();
      }
      segments.back().emplace_back(frame, rec);
      prev_frame = frame;
    }
    int seg_index = 0;
    for (const auto& seg : segments) {
      const int this_index = seg_index++;
      if (seg.size() < 2) {
        ++out.discarded_short;
        continue;
      }
      Trajectory traj;
      traj.mode = track_mode[id];
      traj.track_id = opt.track_prefix + std::to_string(id);
      if (segments.size() > 1) traj.track_id += "#" + std::to_string(this_index);
      const long f0 = seg.front().first;
      auto bottom_mid = [&](const AnnotationRecord& r) {
        return Point2{0.5 * (r.xmin + r.xmax) * opt.scale_m_per_px, r.ymax * opt.scale_m_per_px};
      };
      for (std::size_t k = 0; k < seg.size(); ++k) {
        const auto [frame, rec] = seg[k];
        const auto p = bottom_mid(*rec);
        if (k > 0) {
          // linear resampling across short gaps
          const auto [pf, prec] = seg[k - 1];
          const auto q = bottom_mid(*prec);
          for (long g = pf + 1; g < frame; ++g) {
            const double w = static_cast<double>(g - pf) / static_cast<double>(frame - pf);
            traj.points.push_back({static_cast<double>(g - f0) * step, q.x + w * (p.x - q.x),
                                   q.y + w * (p.y - q.y)});
          }
        }
        traj.points.push_back({static_cast<double>(frame - f0) * step, p.x, p.y});
      }
      out.trajectories.push_back(std::move(traj));
    }
  }
  return out;
}

IngestResult ingest_annotations(const std::filesystem::path& file, double scale_m_per_px,
                                double fps, const std::string& track_prefix) {
  if (!(scale_m_per_px > 0.0)) throw DataError("pixel-to-meter scale must be positive");
  if (!(fps > 0.0)) throw DataError("frame rate must be positive");
  std::ifstream f(file);
  if (!f) throw DataError("cannot open annotation file '" + file.string() + "'");
  auto parsed = parse_annotations(f);
  IngestOptions opt;
  opt.scale_m_per_px = scale_m_per_px;
  opt.fps = fps;
  opt.track_prefix = track_prefix;
  auto result = build_trajectories(parsed.records, opt);
  result.issues.insert(result.issues.begin(), parsed.issues.begin(), parsed.issues.end());
  if (result.trajectories.empty()) {
    throw DataError("no micro-mobility trajectories in '" + file.string() + "'");
  }
  return result;
}

}  // namespace gm3
