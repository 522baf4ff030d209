#include <doctest.h>

#include <cmath>
#include <random>

#include "brcf/scale_estimation.hpp"

using namespace brcf;

namespace {

ResponseMap ramp(int rows, int cols) {
  RealGrid g(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int dr = std::min(r, rows - r), dc = std::min(c, cols - c);
      g.at(r, c) = std::exp(-0.1 * (dr * dr + dc * dc));
    }
  return ResponseMap::from_grid(std::move(g));
}

Keypoint at(double x, double y) {
  Keypoint k;
  k.x = x;
  k.y = y;
  k.scale = 2.0;
  return k;
}

MatchPairs diagonal(std::size_t n) {
  MatchPairs m;
  for (std::size_t i = 0; i < n; ++i) m.pairs.push_back({static_cast<int>(i), static_cast<int>(i), 0.0});
  return m;
}

}  // namespace

TEST_CASE("keypoint weights") {
  const ResponseMap r = ramp(10, 10);
  const ResponseGeometry geom{50.0, 40.0, 4.0};
  const std::vector<Keypoint> pts{at(50, 40), at(54, 40), at(50, 48), at(62, 52), at(200, 40)};
  const KeypointWeights w = keypoint_weights(r, diagonal(pts.size()), pts, pts, geom, geom);
  REQUIRE(w.prev.size() == pts.size());
  CHECK(w.prev[0] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(w.prev[i] < w.prev[0]);
  for (double v : w.prev) CHECK(v >= kKeypointWeightFloor);
  CHECK(w.prev[4] == kKeypointWeightFloor);
  CHECK(w.prev == w.next);

  // Between cells the weight interpolates the two neighbours.
  const KeypointWeights half = keypoint_weights(r, diagonal(1), std::vector{at(52, 40)}, std::vector{at(52, 40)}, geom, geom);
  CHECK(half.prev[0] == doctest::Approx(0.5 * (w.prev[0] + w.prev[1])));

  const ResponseMap flat = ResponseMap::from_grid(RealGrid(6, 6, 0.3));
  const KeypointWeights u = keypoint_weights(flat, diagonal(3), pts, pts, geom, geom);
  CHECK(u.prev[0] == u.prev[1]);
  CHECK(u.prev[1] == u.prev[2]);

  CHECK(keypoint_weights(r, MatchPairs{}, pts, pts, geom, geom).prev.empty());
}

TEST_CASE("weighted centroid") {
  const std::vector<Point2> one{{3.5, -2.0}};
  CHECK(weighted_centroid(one, std::vector{0.2}) == Point2{3.5, -2.0});
  const std::vector<Point2> pts{{0, 0}, {4, 0}, {2, 6}};
  const Point2 mean = weighted_centroid(pts, std::vector{1.0, 1.0, 1.0});
  CHECK(mean.x == doctest::Approx(2.0));
  CHECK(mean.y == doctest::Approx(2.0));
  const Point2 c = weighted_centroid(std::vector<Point2>{{0, 0}, {4, 0}}, std::vector{1.0, 3.0});
  CHECK(c.x == 3.0);
  CHECK(c.y == 0.0);
  CHECK_THROWS(weighted_centroid(std::vector<Point2>{}, std::vector<double>{}));
  CHECK_THROWS(weighted_centroid(pts, std::vector{1.0, 1.0}));
  CHECK_THROWS(weighted_centroid(pts, std::vector{0.0, 0.0, 0.0}));
}

TEST_CASE("scale ratio") {
  const Point2 c{100, 100};
  CHECK(estimate_scale({110, 100}, c, {110, 100}, c, 10) == 1.0);
  CHECK(estimate_scale({110, 100}, c, {100, 112}, c, 10) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(estimate_scale(c, c, {130, 100}, c, 10) == 1.0);
  CHECK(estimate_scale({110, 100}, c, {112, 100}, c, 3) == 1.0);
  CHECK(estimate_scale({110, 100}, c, {150, 100}, c, 10) == 1.25);
  CHECK(estimate_scale({110, 100}, c, {101, 100}, c, 10) == 0.8);
  CHECK(scale_ratio({110, 100}, c, {150, 100}, c) == doctest::Approx(5.0));
  ScaleLimits wide;
  wide.min_distance = 20.0;
  CHECK(estimate_scale({110, 100}, c, {112, 100}, c, 10, wide) == 1.0);
}

TEST_CASE("analytic keypoints scaled about the centre") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-30.0, 30.0), pw(0.1, 1.0);
  const Point2 c_prev{160, 120}, c_next{163, 118};
  for (double s : {0.9, 1.1}) {
    std::vector<Point2> prev, next;
    std::vector<double> w;
    for (int i = 0; i < 25; ++i) {
      const double dx = u(rng), dy = u(rng);
      prev.push_back({c_prev.x + dx, c_prev.y + dy});
      next.push_back({c_next.x + s * dx, c_next.y + s * dy});
      w.push_back(pw(rng));
    }
    const Point2 mp = weighted_centroid(prev, w), ml = weighted_centroid(next, w);
    CHECK(std::abs(scale_ratio(mp, c_prev, ml, c_next) - s) < 1e-9);
    CHECK(std::abs(estimate_scale(mp, c_prev, ml, c_next, 25) - s) < 1e-9);
  }
}
