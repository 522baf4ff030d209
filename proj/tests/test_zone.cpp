#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "brcf/zone.hpp"

using namespace brcf;

namespace {

Zone square_zone() { return {{{100, 100}, {200, 100}, {200, 200}, {100, 200}}, {50.0, 20.0, 5.0}}; }

Zone concave_zone() { return {{{0, 0}, {120, 0}, {120, 40}, {40, 40}, {40, 120}, {0, 120}}, {30.0, 10.0}}; }

std::vector<Point2> sample_outline(const std::vector<Point2>& poly, int per_edge) {
  std::vector<Point2> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
    for (int k = 0; k < per_edge; ++k) {
      const double t = static_cast<double>(k) / per_edge;
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

/// Minimum distance between densely sampled box and polygon outlines.
double sampled_distance(const BBox& box, const Zone& zone) {
  const std::vector<Point2> corners{{box.left(), box.top()}, {box.right(), box.top()}, {box.right(), box.bottom()},
                                    {box.left(), box.bottom()}};
  const auto a = sample_outline(corners, 40);
  const auto b = sample_outline(zone.polygon, 2000);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a)
    for (const auto& q : b) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
  return best;
}

}  // namespace

TEST_CASE("zone distance examples") {
  const Zone z = square_zone();
  CHECK(zone_distance(BBox{150, 150, 10, 10}, z) == 0.0);
  CHECK(zone_distance(BBox{95, 150, 20, 10}, z) == 0.0);
  CHECK(zone_distance(BBox{250, 150, 1, 1}, z) == doctest::Approx(49.5));
  CHECK(zone_distance(BBox{230.5, 230.5, 1, 1}, z) == doctest::Approx(std::hypot(30.0, 30.0)));
  // A box that swallows the whole polygon.
  CHECK(zone_distance(BBox{150, 150, 400, 400}, z) == 0.0);
}

TEST_CASE("zone distance matches dense outline sampling") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(-80.0, 260.0);
  for (const Zone& z : {square_zone(), concave_zone()}) {
    int checked = 0;
    while (checked < 60) {
      const BBox b{pos(rng), pos(rng), 1.0, 1.0};
      const double d = zone_distance(b, z);
      if (d == 0.0) continue;
      ++checked;
      REQUIRE(std::abs(d - sampled_distance(b, z)) < 0.1);
    }
  }
}

TEST_CASE("zone distance is 1-lipschitz per axis step") {
  const Zone z = concave_zone();
  BBox b{-40, 200, 6, 6};
  double prev = zone_distance(b, z);
  for (int i = 0; i < 300; ++i) {
    b.cx += i % 3 == 0 ? 1.0 : 0.0;
    b.cy -= i % 3 == 0 ? 0.0 : 1.0;
    const double d = zone_distance(b, z);
    REQUIRE(std::abs(d - prev) <= std::sqrt(2.0) + 1e-12);
    prev = d;
  }
}

TEST_CASE("alarm levels") {
  const Zone z = square_zone();
  CHECK(zone_alarm(0.0, z) == 3);
  CHECK(zone_alarm(1000.0, z) == 0);
  CHECK(zone_alarm(50.0, z) == 0);
  CHECK(zone_alarm(49.999, z) == 1);
  CHECK(zone_alarm(20.0, z) == 1);
  CHECK(zone_alarm(19.0, z) == 2);
  CHECK(zone_alarm(4.0, z) == 3);
  int prev = 3;
  for (double d = 0.0; d < 80.0; d += 0.25) {
    const int level = zone_alarm(d, z);
    REQUIRE(level <= prev);
    prev = level;
  }
}

TEST_CASE("approach raises the alarm monotonically") {
  const Zone z = square_zone();
  std::vector<int> levels;
  for (int t = 0; t <= 60; ++t) levels.push_back(zone_alarm(zone_distance(BBox{320.0 - 2.0 * t, 150, 20, 20}, z), z));
  for (std::size_t i = 1; i < levels.size(); ++i) REQUIRE(levels[i] >= levels[i - 1]);
  CHECK(levels.front() == 0);
  CHECK(levels.back() == 3);
}

TEST_CASE("zone validation and parsing") {
  CHECK_THROWS(validate_zone({{{0, 0}, {1, 1}}, {5}}));
  CHECK_THROWS(validate_zone({{{0, 0}, {10, 10}, {10, 0}, {0, 10}}, {5}}));
  CHECK_THROWS(validate_zone({{{0, 0}, {10, 0}, {20, 0}}, {5}}));
  CHECK_THROWS(validate_zone({{{0, 0}, {10, 0}, {0, 10}}, {5, 10}}));
  CHECK_THROWS(validate_zone({{{0, 0}, {10, 0}, {0, 10}}, {5, -1}}));

  const auto zones = parse_zones("# harbour\n0,0 10,0 10,10 | 30,10\n\n5,5 50,5 50,50 5,50 | 8\n");
  REQUIRE(zones.size() == 2u);
  CHECK(zones[0].polygon.size() == 3u);
  CHECK(zones[0].thresholds == std::vector<double>{30, 10});
  CHECK(zones[1].polygon[2] == Point2{50, 50});
  CHECK_THROWS(parse_zone_line("0,0 10,0 10,10"));
  CHECK_THROWS(parse_zone_line("0,0 10,x 10,10 | 5"));
}
