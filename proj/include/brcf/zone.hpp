#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "brcf/bbox.hpp"
#include "brcf/scale_estimation.hpp"

namespace brcf {

/// Restricted area: a simple polygon plus alarm distances, largest first.
struct Zone {
  std::vector<Point2> polygon;
  std::vector<double> thresholds;
};

/// Throws unless the polygon has >= 3 vertices, no self-intersections and non-zero area,
/// and the thresholds are positive and strictly decreasing.
void validate_zone(const Zone& zone);

bool point_in_polygon(Point2 p, const std::vector<Point2>& polygon);
double point_segment_distance(Point2 p, Point2 a, Point2 b);
double segment_distance(Point2 a, Point2 b, Point2 c, Point2 d);
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);

/// Smallest distance between the box and the polygon region; 0 when they overlap.
double zone_distance(const BBox& box, const Zone& zone);

/// Number of thresholds the distance lies strictly below; thresholds().size() means alarm.
int zone_alarm(double distance, const Zone& zone);

/// One zone per line: `x1,y1 x2,y2 ... | t1,t2,...`. Blank lines and '#' comments are skipped.
Zone parse_zone_line(const std::string& line);
std::vector<Zone> parse_zones(const std::string& text);
std::vector<Zone> load_zones(const std::filesystem::path& path);

}  // namespace brcf
