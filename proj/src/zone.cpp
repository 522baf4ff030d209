#include "brcf/zone.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace brcf {

namespace {

double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Point2 p, Point2 a, Point2 b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

std::vector<Point2> box_corners(const BBox& b) {
  return {{b.left(), b.top()}, {b.right(), b.top()}, {b.right(), b.bottom()}, {b.left(), b.bottom()}};
}

std::vector<double> parse_list(const std::string& text, char sep, const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("zone: bad number in '" + line + "'");
    }
  }
  return out;
}

}  // namespace

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

double segment_distance(Point2 a, Point2 b, Point2 c, Point2 d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                   point_segment_distance(d, a, b)});
}

bool point_in_polygon(Point2 p, const std::vector<Point2>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

void validate_zone(const Zone& zone) {
  const auto& p = zone.polygon;
  const std::size_t n = p.size();
  if (n < 3) throw std::invalid_argument("zone: polygon needs at least 3 vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = p[i], b = p[(i + 1) % n];
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) throw std::invalid_argument("zone: non-finite vertex");
    area2 += a.x * b.y - b.x * a.y;
  }
  if (std::abs(area2) < 1e-12) throw std::invalid_argument("zone: degenerate polygon");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]))
        throw std::invalid_argument("zone: polygon edges intersect");
    }
  }
  for (std::size_t k = 0; k < zone.thresholds.size(); ++k) {
    if (!(zone.thresholds[k] > 0.0)) throw std::invalid_argument("zone: thresholds must be positive");
    if (k > 0 && !(zone.thresholds[k] < zone.thresholds[k - 1]))
      throw std::invalid_argument("zone: thresholds must be strictly decreasing");
  }
}

double zone_distance(const BBox& box, const Zone& zone) {
  validate_zone(zone);
  if (!box.valid()) throw std::invalid_argument("zone_distance: invalid box");
  const auto& poly = zone.polygon;
  const auto corners = box_corners(box);
  if (point_in_polygon({box.cx, box.cy}, poly)) return 0.0;
  for (const auto& c : corners) {
    if (point_in_polygon(c, poly)) return 0.0;
  }
  for (const auto& v : poly) {
    if (v.x >= box.left() && v.x <= box.right() && v.y >= box.top() && v.y <= box.bottom()) return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
    for (std::size_t k = 0; k < 4; ++k) best = std::min(best, segment_distance(corners[k], corners[(k + 1) % 4], a, b));
  }
  return best;
}

int zone_alarm(double distance, const Zone& zone) {
  int level = 0;
  for (double t : zone.thresholds) level += distance < t ? 1 : 0;
  return level;
}

Zone parse_zone_line(const std::string& line) {
  const auto bar = line.find('|');
  if (bar == std::string::npos) throw std::invalid_argument("zone: expected 'vertices | thresholds' in '" + line + "'");
  Zone zone;
  std::stringstream vs(line.substr(0, bar));
  std::string vertex;
  while (vs >> vertex) {
    const auto xy = parse_list(vertex, ',', line);
    if (xy.size() != 2) throw std::invalid_argument("zone: vertex must be x,y in '" + line + "'");
    zone.polygon.push_back({xy[0], xy[1]});
  }
  zone.thresholds = parse_list(line.substr(bar + 1), ',', line);
  if (zone.thresholds.empty()) throw std::invalid_argument("zone: no thresholds in '" + line + "'");
  validate_zone(zone);
  return zone;
}

std::vector<Zone> parse_zones(const std::string& text) {
  std::vector<Zone> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_zone_line(line));
  }
  return out;
}

std::vector<Zone> load_zones(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open zones file " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_zones(buf.str());
}

}  // namespace brcf
