#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "brcf/media_io.hpp"

namespace brcf {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double scale = 0.0;
  /// Approximated det(Hessian) at the extremum, image scaled to [0, 1].
  double response = 0.0;
  /// Radians in [0, 2*pi), measured from +x towards +y (image rows grow downwards).
  double orientation = 0.0;
  /// False when the orientation window left the image and the orientation was forced to 0.
  bool orientation_valid = true;
};

inline constexpr std::size_t kDescriptorSize = 64;
using Descriptor = std::array<double, kDescriptorSize>;

struct HessianParams {
  int octaves = 3;
  int intervals = 4;
  int init_sample = 2;
};

/// Smallest image side the detector accepts.
inline constexpr int kMinDetectorSide = 15;

/// Fast-Hessian detection: box-filter det(Hessian) over octaves x intervals, 3x3x3
/// non-maximum suppression, quadratic sub-pixel refinement, strongest `max_points` kept.
std::vector<Keypoint> detect_keypoints(const IntegralImage& integral, double threshold, std::size_t max_points,
                                       const HessianParams& params = {});

/// Dominant direction of Gaussian-weighted Haar responses within radius 6s, found with a
/// sliding pi/3 sector.
Keypoint assign_orientation(const IntegralImage& integral, Keypoint kp);

/// 4x4 subregions of (sum dx, sum dy, sum |dx|, sum |dy|) over an oriented 20s window,
/// L2-normalised. Samples outside the image replicate the border.
Descriptor describe_keypoint(const IntegralImage& integral, const Keypoint& kp);

/// Haar wavelet responses of side `size` centred at (x, y), border replicated.
double haar_x(const IntegralImage& integral, int x, int y, int size);
double haar_y(const IntegralImage& integral, int x, int y, int size);

/// Box sum over [x0, x0 + cols) x [y0, y0 + rows) where out-of-image pixels take the
/// value of the nearest border pixel.
double replicated_box_sum(const IntegralImage& integral, int y0, int x0, int rows, int cols);

struct DescribedKeypoints {
  std::vector<Keypoint> points;
  std::vector<Descriptor> descriptors;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Detection, orientation (unless `upright`) and description in one pass.
DescribedKeypoints detect_and_describe(const Frame& gray, double threshold, std::size_t max_points,
                                       bool upright = false, const HessianParams& params = {});

struct Match {
  int prev = 0;
  int next = 0;
  double distance = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

struct MatchPairs {
  std::vector<Match> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

double descriptor_distance(const Descriptor& a, const Descriptor& b);

/// Nearest-neighbour matching on Euclidean descriptor distance with a Lowe ratio test
/// (best < ratio * second best, both directions) and a mutual-best cross-check.
/// The result is sorted by `prev` and is one-to-one. Either side empty gives no pairs.
MatchPairs match_keypoints(std::span<const Descriptor> prev, std::span<const Descriptor> next,
                           double ratio = 0.7);

}  // namespace brcf
