#include "brcf/scale_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brcf {

namespace {

// Bilinear read of the min-max normalised response at a fractional circular shift.
double weight_at(const ResponseMap& response, double lo, double range, const Keypoint& kp,
                 const ResponseGeometry& geom) {
  const RealGrid& g = response.values;
  const double dy = (kp.y - geom.center_y) / geom.pixels_per_cell;
  const double dx = (kp.x - geom.center_x) / geom.pixels_per_cell;
  if (!(std::abs(dy) <= g.rows / 2) || !(std::abs(dx) <= g.cols / 2)) return kKeypointWeightFloor;
  const double fy = std::floor(dy), fx = std::floor(dx);
  const double ay = dy - fy, ax = dx - fx;
  auto cell = [&g](long r, long c) { return g.at(static_cast<int>(((r % g.rows) + g.rows) % g.rows),
                                                static_cast<int>(((c % g.cols) + g.cols) % g.cols)); };
  const long r0 = static_cast<long>(fy), c0 = static_cast<long>(fx);
  const double v = (1.0 - ay) * ((1.0 - ax) * cell(r0, c0) + ax * cell(r0, c0 + 1)) +
                   ay * ((1.0 - ax) * cell(r0 + 1, c0) + ax * cell(r0 + 1, c0 + 1));
  const double norm = range > 0.0 ? (v - lo) / range : 1.0;
  return std::max(norm, kKeypointWeightFloor);
}

}  // namespace

KeypointWeights keypoint_weights(const ResponseMap& response, const MatchPairs& pairs,
                                 std::span<const Keypoint> prev, std::span<const Keypoint> next,
                                 const ResponseGeometry& prev_geom, const ResponseGeometry& next_geom) {
  KeypointWeights out;
  if (pairs.empty() || response.values.size() == 0) return out;
  const auto [lo_it, hi_it] = std::minmax_element(response.values.data.begin(), response.values.data.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  out.prev.reserve(pairs.size());
  out.next.reserve(pairs.size());
  for (const auto& m : pairs.pairs) {
    out.prev.push_back(weight_at(response, lo, range, prev[m.prev], prev_geom));
    out.next.push_back(weight_at(response, lo, range, next[m.next], next_geom));
  }
  return out;
}

Point2 weighted_centroid(std::span<const Point2> points, std::span<const double> weights) {
  if (points.empty()) throw std::invalid_argument("weighted_centroid: no points");
  if (points.size() != weights.size()) throw std::invalid_argument("weighted_centroid: size mismatch");
  double sx = 0.0, sy = 0.0, sw = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sx += weights[i] * points[i].x;
    sy += weights[i] * points[i].y;
    sw += weights[i];
  }
  if (!(sw > 0.0)) throw std::invalid_argument("weighted_centroid: weights must sum to a positive value");
  return {sx / sw, sy / sw};
}

double scale_ratio(Point2 m_prev, Point2 c_prev, Point2 m_next, Point2 c_next) {
  return std::hypot(m_next.x - c_next.x, m_next.y - c_next.y) / std::hypot(m_prev.x - c_prev.x, m_prev.y - c_prev.y);
}

double estimate_scale(Point2 m_prev, Point2 c_prev, Point2 m_next, Point2 c_next, int match_count,
                      const ScaleLimits& limits) {
  if (match_count < limits.min_matches) return 1.0;
  if (std::hypot(m_prev.x - c_prev.x, m_prev.y - c_prev.y) < limits.min_distance) return 1.0;
  const double s = scale_ratio(m_prev, c_prev, m_next, c_next);
  if (!std::isfinite(s)) return 1.0;
  return std::clamp(s, limits.clamp_lo, limits.clamp_hi);
}

}  // namespace brcf
