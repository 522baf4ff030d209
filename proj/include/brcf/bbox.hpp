#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>

namespace brcf {

/// Axis-aligned box in center form, all values in pixels.
struct BBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  static BBox from_corner(double x, double y, double w, double h) {
    return {x + w / 2.0, y + h / 2.0, w, h};
  }

  double left() const { return cx - w / 2.0; }
  double top() const { return cy - h / 2.0; }
  double right() const { return cx + w / 2.0; }
  double bottom() const { return cy + h / 2.0; }
  double area() const { return w * h; }

  bool valid() const {
    return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h) &&
           w > 0.0 && h > 0.0;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const BBox& b) {
  return os << "BBox(" << b.cx << ", " << b.cy << ", " << b.w << ", " << b.h << ")";
}

/// Intersection over union, in [0, 1].
inline double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

inline double center_distance(const BBox& a, const BBox& b) {
  return std::hypot(a.cx - b.cx, a.cy - b.cy);
}

}  // namespace brcf
