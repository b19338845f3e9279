#pragma once

#include <span>
#include <string>
#include <vector>

namespace gm3 {

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

// Uniformly sampled world-frame path of one tracked agent.
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::string mode;  // "biker", "skater" or "cart"
  std::string track_id;

  double dt() const;           // sample spacing (0 for fewer than 2 points)
  double path_length() const;  // sum of segment lengths
  // Throws DataError unless there are >= 2 finite points at a uniform step
  // (within 1e-6 s).
  void validate() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

std::vector<Point2> positions(const Trajectory& t);

// Mean pointwise Euclidean distance. Requires equal lengths; the
// Trajectory overload also requires timestamps aligned within 1e-6 s.
double ade(std::span<const Point2> estimated, std::span<const Point2> truth);
double ade(const Trajectory& estimated, const Trajectory& truth);

// Discrete Frechet distance with Euclidean ground distance, computed by the
// coupling dynamic program in O(|p| |q|) time and O(|q|) memory.
double discrete_frechet(std::span<const Point2> p, std::span<const Point2> q);
double discrete_frechet(const Trajectory& p, const Trajectory& q);

}  // namespace gm3
