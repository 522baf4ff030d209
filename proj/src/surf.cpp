#include "brcf/surf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace brcf {

namespace {

constexpr double kInv255 = 1.0 / 255.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

// det(Hessian) samples of one box-filter size on a subsampled grid.
struct ResponseLayer {
  int rows = 0;
  int cols = 0;
  int step = 1;
  int filter = 9;
  std::vector<double> det;

  double at(int r, int c) const { return det[static_cast<std::size_t>(r) * cols + c]; }
};

ResponseLayer build_layer(const IntegralImage& img, int filter, int step) {
  ResponseLayer layer;
  layer.step = step;
  layer.filter = filter;
  layer.rows = img.height() / step;
  layer.cols = img.width() / step;
  layer.det.assign(static_cast<std::size_t>(layer.rows) * layer.cols, 0.0);

  const int b = (filter - 1) / 2;
  const int l = filter / 3;
  const int w = filter;
  const double norm = kInv255 / (static_cast<double>(w) * w);
  for (int ar = 0; ar < layer.rows; ++ar) {
    const int r = ar * step;
    for (int ac = 0; ac < layer.cols; ++ac) {
      const int c = ac * step;
      double dxx = img.box_sum(r - l + 1, c - b, 2 * l - 1, w) - 3.0 * img.box_sum(r - l + 1, c - l / 2, 2 * l - 1, l);
      double dyy = img.box_sum(r - b, c - l + 1, w, 2 * l - 1) - 3.0 * img.box_sum(r - l / 2, c - l + 1, l, 2 * l - 1);
      double dxy = img.box_sum(r - l, c + 1, l, l) + img.box_sum(r + 1, c - l, l, l) -
                   img.box_sum(r - l, c - l, l, l) - img.box_sum(r + 1, c + 1, l, l);
      dxx *= norm;
      dyy *= norm;
      dxy *= norm;
      layer.det[static_cast<std::size_t>(ar) * layer.cols + ac] = dxx * dyy - 0.81 * dxy * dxy;
    }
  }
  return layer;
}

bool is_extremum(const ResponseLayer& t, const ResponseLayer& m, const ResponseLayer& b, int r, int c,
                 double threshold) {
  const int border = (t.filter + 1) / (2 * t.step);
  if (r <= border || r >= t.rows - border || c <= border || c >= t.cols - border) return false;
  const double candidate = m.at(r, c);
  if (candidate < threshold) return false;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (t.at(r + dr, c + dc) >= candidate) return false;
      if ((dr != 0 || dc != 0) && m.at(r + dr, c + dc) >= candidate) return false;
      if (b.at(r + dr, c + dc) >= candidate) return false;
    }
  }
  return true;
}

// Quadratic refinement in (x, y, scale); false when the offset leaves the sample cell.
bool interpolate(const ResponseLayer& t, const ResponseLayer& m, const ResponseLayer& b, int r, int c,
                 Keypoint& out) {
  const double v = m.at(r, c);
  const double dx = (m.at(r, c + 1) - m.at(r, c - 1)) / 2.0;
  const double dy = (m.at(r + 1, c) - m.at(r - 1, c)) / 2.0;
  const double ds = (t.at(r, c) - b.at(r, c)) / 2.0;
  const double hxx = m.at(r, c + 1) + m.at(r, c - 1) - 2.0 * v;
  const double hyy = m.at(r + 1, c) + m.at(r - 1, c) - 2.0 * v;
  const double hss = t.at(r, c) + b.at(r, c) - 2.0 * v;
  const double hxy = (m.at(r + 1, c + 1) - m.at(r + 1, c - 1) - m.at(r - 1, c + 1) + m.at(r - 1, c - 1)) / 4.0;
  const double hxs = (t.at(r, c + 1) - t.at(r, c - 1) - b.at(r, c + 1) + b.at(r, c - 1)) / 4.0;
  const double hys = (t.at(r + 1, c) - t.at(r - 1, c) - b.at(r + 1, c) + b.at(r - 1, c)) / 4.0;

  const double det = hxx * (hyy * hss - hys * hys) - hxy * (hxy * hss - hys * hxs) + hxs * (hxy * hys - hyy * hxs);
  if (std::abs(det) < 1e-30) return false;
  // Inverse of the symmetric Hessian via cofactors.
  const double i00 = (hyy * hss - hys * hys) / det;
  const double i01 = (hxs * hys - hxy * hss) / det;
  const double i02 = (hxy * hys - hxs * hyy) / det;
  const double i11 = (hxx * hss - hxs * hxs) / det;
  const double i12 = (hxy * hxs - hxx * hys) / det;
  const double i22 = (hxx * hyy - hxy * hxy) / det;
  const double ox = -(i00 * dx + i01 * dy + i02 * ds);
  const double oy = -(i01 * dx + i11 * dy + i12 * ds);
  const double os = -(i02 * dx + i12 * dy + i22 * ds);
  if (std::abs(ox) >= 0.5 || std::abs(oy) >= 0.5 || std::abs(os) >= 0.5) return false;

  out.x = (c + ox) * t.step;
  out.y = (r + oy) * t.step;
  out.scale = 0.1333 * (m.filter + os * (m.filter - b.filter));
  out.response = v;
  return out.scale > 0.0;
}

}  // namespace

double replicated_box_sum(const IntegralImage& img, int y0, int x0, int rows, int cols) {
  if (rows <= 0 || cols <= 0) return 0.0;
  const int w = img.width();
  const int h = img.height();
  if (x0 >= 0 && y0 >= 0 && x0 + cols <= w && y0 + rows <= h)
    return static_cast<double>(img.rect_sum(x0, y0, x0 + cols, y0 + rows));

  // Split each axis into the part before the image (replicating index 0), the part
  // inside, and the part after (replicating the last index).
  struct Segment {
    int begin = 0, end = 0;
    long long multiplicity = 0;
  };
  auto split = [](int lo, int count, int extent, std::array<Segment, 3>& segs) {
    const int hi = lo + count;
    int n = 0;
    const int before = std::max(0, std::min(hi, 0) - lo);
    if (before > 0) segs[n++] = {0, 1, before};
    const int in0 = std::max(lo, 0);
    const int in1 = std::min(hi, extent);
    if (in1 > in0) segs[n++] = {in0, in1, 1};
    const int after = std::max(0, hi - std::max(lo, extent));
    if (after > 0) segs[n++] = {extent - 1, extent, after};
    return n;
  };
  std::array<Segment, 3> row_segs, col_segs;
  const int nr = split(y0, rows, h, row_segs);
  const int nc = split(x0, cols, w, col_segs);
  double sum = 0.0;
  for (int i = 0; i < nr; ++i) {
    const auto& rs = row_segs[i];
    for (int j = 0; j < nc; ++j) {
      const auto& cs = col_segs[j];
      sum += static_cast<double>(rs.multiplicity * cs.multiplicity) *
             static_cast<double>(img.rect_sum(cs.begin, rs.begin, cs.end, rs.end));
    }
  }
  return sum;
}

double haar_x(const IntegralImage& img, int x, int y, int size) {
  const int half = size / 2;
  return (replicated_box_sum(img, y - half, x, size, half) - replicated_box_sum(img, y - half, x - half, size, half)) *
         kInv255;
}

double haar_y(const IntegralImage& img, int x, int y, int size) {
  const int half = size / 2;
  return (replicated_box_sum(img, y, x - half, half, size) - replicated_box_sum(img, y - half, x - half, half, size)) *
         kInv255;
}

std::vector<Keypoint> detect_keypoints(const IntegralImage& integral, double threshold, std::size_t max_points,
                                       const HessianParams& params) {
  if (integral.width() < kMinDetectorSide || integral.height() < kMinDetectorSide)
    throw std::invalid_argument("detect_keypoints: image smaller than 15x15");
  if (params.octaves < 1 || params.intervals < 3 || params.init_sample < 1)
    throw std::invalid_argument("detect_keypoints: invalid pyramid parameters");

  std::vector<Keypoint> found;
  for (int o = 0; o < params.octaves; ++o) {
    const int step = params.init_sample << o;
    if (integral.width() / step < 3 || integral.height() / step < 3) break;
    std::vector<ResponseLayer> layers;
    for (int i = 0; i < params.intervals; ++i) {
      const int filter = 3 * ((1 << (o + 1)) * (i + 1) + 1);
      layers.push_back(build_layer(integral, filter, step));
    }
    for (int i = 0; i + 2 < params.intervals; ++i) {
      const auto& b = layers[i];
      const auto& m = layers[i + 1];
      const auto& t = layers[i + 2];
      for (int r = 0; r < t.rows; ++r) {
        for (int c = 0; c < t.cols; ++c) {
          if (!is_extremum(t, m, b, r, c, threshold)) continue;
          Keypoint kp;
          if (interpolate(t, m, b, r, c, kp)) found.push_back(kp);
        }
      }
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Keypoint& a, const Keypoint& b) { return a.response > b.response; });
  if (found.size() > max_points) found.resize(max_points);
  return found;
}

Keypoint assign_orientation(const IntegralImage& integral, Keypoint kp) {
  const int s = std::max(1, static_cast<int>(std::lround(kp.scale)));
  const int cx = static_cast<int>(std::lround(kp.x));
  const int cy = static_cast<int>(std::lround(kp.y));
  const int reach = 8 * s;
  if (cx - reach < 0 || cy - reach < 0 || cx + reach >= integral.width() || cy + reach >= integral.height()) {
    kp.orientation = 0.0;
    kp.orientation_valid = false;
    return kp;
  }

  struct Sample {
    double rx, ry, angle;
  };
  std::vector<Sample> samples;
  samples.reserve(113);
  const double inv2s2 = 1.0 / (2.0 * 2.5 * 2.5);
  for (int i = -6; i <= 6; ++i) {
    for (int j = -6; j <= 6; ++j) {
      if (i * i + j * j >= 36) continue;
      const double g = std::exp(-(i * i + j * j) * inv2s2);
      const double rx = g * haar_x(integral, cx + i * s, cy + j * s, 4 * s);
      const double ry = g * haar_y(integral, cx + i * s, cy + j * s, 4 * s);
      samples.push_back({rx, ry, wrap_angle(std::atan2(ry, rx))});
    }
  }

  constexpr double kSector = std::numbers::pi / 3.0;
  double best = 0.0;
  double orientation = 0.0;
  for (double a1 = 0.0; a1 < kTwoPi; a1 += 0.15) {
    const double a2 = a1 + kSector;
    double sx = 0.0, sy = 0.0;
    for (const auto& sm : samples) {
      const bool inside = a2 < kTwoPi ? (sm.angle >= a1 && sm.angle < a2)
                                      : (sm.angle >= a1 || sm.angle < a2 - kTwoPi);
      if (inside) {
        sx += sm.rx;
        sy += sm.ry;
      }
    }
    const double mag = sx * sx + sy * sy;
    if (mag > best) {
      best = mag;
      orientation = wrap_angle(std::atan2(sy, sx));
    }
  }
  kp.orientation = orientation;
  kp.orientation_valid = true;
  return kp;
}

Descriptor describe_keypoint(const IntegralImage& integral, const Keypoint& kp) {
  Descriptor desc{};
  const double s = kp.scale;
  const double co = std::cos(kp.orientation);
  const double si = std::sin(kp.orientation);
  const int haar_size = std::max(2, 2 * static_cast<int>(std::lround(s)));
  const double inv2sig2 = 1.0 / (2.0 * (3.3 * s) * (3.3 * s));

  for (int k = 0; k < 20; ++k) {
    const double u = (k - 9.5) * s;
    for (int l = 0; l < 20; ++l) {
      const double v = (l - 9.5) * s;
      const double px = kp.x + co * u - si * v;
      const double py = kp.y + si * u + co * v;
      const double g = std::exp(-(u * u + v * v) * inv2sig2);
      const int ix = static_cast<int>(std::lround(px));
      const int iy = static_cast<int>(std::lround(py));
      const double rx = haar_x(integral, ix, iy, haar_size);
      const double ry = haar_y(integral, ix, iy, haar_size);
      const double du = g * (co * rx + si * ry);
      const double dv = g * (-si * rx + co * ry);
      const int sub = (l / 5) * 4 + (k / 5);
      desc[sub * 4 + 0] += du;
      desc[sub * 4 + 1] += dv;
      desc[sub * 4 + 2] += std::abs(du);
      desc[sub * 4 + 3] += std::abs(dv);
    }
  }
  double norm = 0.0;
  for (double d : desc) norm += d * d;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& d : desc) d /= norm;
  }
  return desc;
}

DescribedKeypoints detect_and_describe(const Frame& gray, double threshold, std::size_t max_points, bool upright,
                                       const HessianParams& params) {
  const IntegralImage integral(gray);
  DescribedKeypoints out;
  out.points = detect_keypoints(integral, threshold, max_points, params);
  out.descriptors.reserve(out.points.size());
  for (auto& kp : out.points) {
    if (!upright) kp = assign_orientation(integral, kp);
    out.descriptors.push_back(describe_keypoint(integral, kp));
  }
  return out;
}

double descriptor_distance(const Descriptor& a, const Descriptor& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kDescriptorSize; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

MatchPairs match_keypoints(std::span<const Descriptor> prev, std::span<const Descriptor> next, double ratio) {
  MatchPairs out;
  if (prev.empty() || next.empty()) return out;
  const std::size_t m = prev.size();
  const std::size_t n = next.size();
  std::vector<double> dist(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = descriptor_distance(prev[i], next[j]);
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  struct Nearest {
    std::size_t index = 0;
    double best = kInf;
    double second = kInf;
  };
  auto passes = [ratio](const Nearest& nn) { return nn.best < ratio * nn.second; };

  std::vector<Nearest> forward(m), backward(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dist[i * n + j];
      auto& f = forward[i];
      if (d < f.best) {
        f.second = f.best;
        f.best = d;
        f.index = j;
      } else if (d < f.second) {
        f.second = d;
      }
      auto& b = backward[j];
      if (d < b.best) {
        b.second = b.best;
        b.best = d;
        b.index = i;
      } else if (d < b.second) {
        b.second = d;
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& f = forward[i];
    if (!passes(f)) continue;
    const auto& b = backward[f.index];
    if (b.index != i || !passes(b)) continue;
    out.pairs.push_back({static_cast<int>(i), static_cast<int>(f.index), f.best});
  }
  return out;
}

}  // namespace brcf
