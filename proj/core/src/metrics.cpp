#include "gm3/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gm3/errors.hpp"

namespace gm3 {
namespace {

double dist(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

double Trajectory::dt() const {
  return points.size() < 2 ? 0.0 : points[1].t - points[0].t;
}

double Trajectory::path_length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    len += std::hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
  }
  return len;
}

void Trajectory::validate() const {
  if (points.size() < 2) throw DataError("trajectory '" + track_id + "' has fewer than 2 points");
  const double step = dt();
  if (!(step > 0.0)) throw DataError("trajectory '" + track_id + "' has a non-positive time step");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!std::isfinite(p.t) || !std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DataError("trajectory '" + track_id + "' has a non-finite point");
    }
    if (i > 0 && std::abs((p.t - points[i - 1].t) - step) > 1.0e-6) {
      throw DataError("trajectory '" + track_id + "' is not uniformly sampled");
    }
  }
}

std::vector<Point2> positions(const Trajectory& t) {
  std::vector<Point2> out;
  out.reserve(t.points.size());
  for (const auto& p : t.points) out.push_back({p.x, p.y});
  return out;
}

double ade(std::span<const Point2> estimated, std::span<const Point2> truth) {
  if (estimated.size() != truth.size()) {
    throw DataError("ADE needs equal-length trajectories (" + std::to_string(estimated.size()) +
                    " vs " + std::to_string(truth.size()) + ")");
  }
  if (estimated.empty()) throw DataError("ADE of empty trajectories");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) sum += dist(estimated[i], truth[i]);
  return sum / static_cast<double>(truth.size());
}

double ade(const Trajectory& estimated, const Trajectory& truth) {
  if (estimated.points.size() == truth.points.size()) {
    for (std::size_t i = 0; i < truth.points.size(); ++i) {
      if (std::abs(estimated.points[i].t - truth.points[i].t) > 1.0e-6) {
        throw DataError("ADE needs aligned timestamps (sample " + std::to_string(i) + ")");
      }
    }
  }
  const auto e = positions(estimated);
  const auto t = positions(truth);
  return ade(e, t);
}

double discrete_frechet(std::span<const Point2> p, std::span<const Point2> q) {
  if (p.empty() || q.empty()) throw DataError("discrete Frechet distance of an empty curve");
  const std::size_t m = q.size();
  std::vector<double> prev(m);
  std::vector<double> cur(m);
  prev[0] = dist(p[0], q[0]);
  for (std::size_t j = 1; j < m; ++j) prev[j] = std::max(prev[j - 1], dist(p[0], q[j]));
  for (std::size_t i = 1; i < p.size(); ++i) {
    cur[0] = std::max(prev[0], dist(p[i], q[0]));
    for (std::size_t j = 1; j < m; ++j) {
      const double reach = std::min({prev[j], prev[j - 1], cur[j - 1]});
      cur[j] = std::max(reach, dist(p[i], q[j]));
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

double discrete_frechet(const Trajectory& p, const Trajectory& q) {
  const auto a = positions(p);
  const auto b = positions(q);
  return discrete_frechet(a, b);
}

}  // namespace gm3
