#pragma once

#include <span>
#include <vector>

#include "brcf/cf_core.hpp"
#include "brcf/surf.hpp"

namespace brcf {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Maps frame pixels to response shifts: shift = (p - center) / pixels_per_cell, where
/// `center` is the frame position that corresponds to the zero shift.
struct ResponseGeometry {
  double center_x = 0.0;
  double center_y = 0.0;
  double pixels_per_cell = 1.0;
};

struct KeypointWeights {
  std::vector<double> prev;
  std::vector<double> next;
};

inline constexpr double kKeypointWeightFloor = 1e-6;

/// Min-max normalised response at each matched keypoint (bilinear between cells), floored at 1e-6.
/// `prev` and `next` hold frame-coordinate keypoints; shifts beyond half the grid get the floor.
KeypointWeights keypoint_weights(const ResponseMap& response, const MatchPairs& pairs,
                                 std::span<const Keypoint> prev, std::span<const Keypoint> next,
                                 const ResponseGeometry& prev_geom, const ResponseGeometry& next_geom);

Point2 weighted_centroid(std::span<const Point2> points, std::span<const double> weights);

/// |M_l - C_l| / |M_p - C_p| without any guard.
double scale_ratio(Point2 m_prev, Point2 c_prev, Point2 m_next, Point2 c_next);

struct ScaleLimits {
  int min_matches = 4;
  double min_distance = 1.0;
  double clamp_lo = 0.8;
  double clamp_hi = 1.25;
};

/// Guarded ratio: 1.0 with fewer than `min_matches` pairs or when |M_p - C_p| is below
/// `min_distance` pixels; otherwise the ratio clamped to [clamp_lo, clamp_hi].
double estimate_scale(Point2 m_prev, Point2 c_prev, Point2 m_next, Point2 c_next, int match_count,
                      const ScaleLimits& limits = {});

}  // namespace brcf
