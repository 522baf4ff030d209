#include "brcf/features.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace brcf {

namespace {

constexpr int kSignedBins = 18;
constexpr int kUnsignedBins = 9;
constexpr double kTruncation = 0.2;
constexpr double kNormEps = 1e-4;

struct OrientationBasis {
  std::array<double, kUnsignedBins> u{};
  std::array<double, kUnsignedBins> v{};
  OrientationBasis() {
    for (int o = 0; o < kUnsignedBins; ++o) {
      u[o] = std::cos(o * std::numbers::pi / kUnsignedBins);
      v[o] = std::sin(o * std::numbers::pi / kUnsignedBins);
    }
  }
};

const OrientationBasis& basis() {
  static const OrientationBasis b;
  return b;
}

}  // namespace

FeatureMap hog(const Frame& patch, int cell_size) {
  if (cell_size < 1) throw std::invalid_argument("hog: cell_size must be >= 1");
  const int rows = patch.height() / cell_size;
  const int cols = patch.width() / cell_size;
  if (rows < 1 || cols < 1) throw std::invalid_argument("hog: patch smaller than one cell");

  const int ch = patch.channels();
  const auto& ob = basis();

  // Orientation histograms with bilinear spatial interpolation into cells.
  std::vector<double> hist(static_cast<std::size_t>(rows) * cols * kSignedBins, 0.0);
  auto hist_at = [&](int r, int c) { return hist.data() + (static_cast<std::size_t>(r) * cols + c) * kSignedBins; };

  for (int y = 0; y < rows * cell_size; ++y) {
    for (int x = 0; x < cols * cell_size; ++x) {
      double best_dx = 0.0, best_dy = 0.0, best_mag2 = -1.0;
      for (int c = 0; c < ch; ++c) {
        const double dx = static_cast<double>(patch.clamped(x + 1, y, c)) - patch.clamped(x - 1, y, c);
        const double dy = static_cast<double>(patch.clamped(x, y + 1, c)) - patch.clamped(x, y - 1, c);
        const double m2 = dx * dx + dy * dy;
        if (m2 > best_mag2) {
          best_mag2 = m2;
          best_dx = dx;
          best_dy = dy;
        }
      }
      const double mag = std::sqrt(best_mag2);
      if (mag == 0.0) continue;

      double best_dot = 0.0;
      int best_o = 0;
      for (int o = 0; o < kUnsignedBins; ++o) {
        const double dot = ob.u[o] * best_dx + ob.v[o] * best_dy;
        if (dot > best_dot) {
          best_dot = dot;
          best_o = o;
        } else if (-dot > best_dot) {
          best_dot = -dot;
          best_o = o + kUnsignedBins;
        }
      }

      const double xp = (x + 0.5) / cell_size - 0.5;
      const double yp = (y + 0.5) / cell_size - 0.5;
      const int ixp = static_cast<int>(std::floor(xp));
      const int iyp = static_cast<int>(std::floor(yp));
      const double vx0 = xp - ixp;
      const double vy0 = yp - iyp;
      const double vx1 = 1.0 - vx0;
      const double vy1 = 1.0 - vy0;
      auto add = [&](int r, int c, double weight) {
        if (r >= 0 && r < rows && c >= 0 && c < cols) hist_at(r, c)[best_o] += weight * mag;
      };
      add(iyp, ixp, vx1 * vy1);
      add(iyp, ixp + 1, vx0 * vy1);
      add(iyp + 1, ixp, vx1 * vy0);
      add(iyp + 1, ixp + 1, vx0 * vy0);
    }
  }

  // Unsigned-gradient energy per cell.
  std::vector<double> energy(static_cast<std::size_t>(rows) * cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double* hc = hist_at(r, c);
      double e = 0.0;
      for (int o = 0; o < kUnsignedBins; ++o) {
        const double s = hc[o] + hc[o + kUnsignedBins];
        e += s * s;
      }
      energy[static_cast<std::size_t>(r) * cols + c] = e;
    }
  }
  auto energy_at = [&](int r, int c) {
    r = std::clamp(r, 0, rows - 1);
    c = std::clamp(c, 0, cols - 1);
    return energy[static_cast<std::size_t>(r) * cols + c];
  };
  auto block_norm = [&](int r0, int c0) {
    const double e = energy_at(r0, c0) + energy_at(r0, c0 + 1) + energy_at(r0 + 1, c0) + energy_at(r0 + 1, c0 + 1);
    return 1.0 / std::sqrt(e + kNormEps);
  };

  FeatureMap out(rows, cols, kHogChannels, cell_size);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      // The four 2x2 blocks that contain this cell.
      const std::array<double, 4> n = {block_norm(r, c), block_norm(r - 1, c), block_norm(r, c - 1),
                                       block_norm(r - 1, c - 1)};
      const double* hc = hist_at(r, c);
      std::array<double, 4> texture{};
      for (int o = 0; o < kSignedBins; ++o) {
        double sum = 0.0;
        for (int i = 0; i < 4; ++i) {
          const double v = std::min(hc[o] * n[i], kTruncation);
          sum += v;
          texture[i] += v;
        }
        out.at(o, r, c) = 0.5 * sum;
      }
      for (int o = 0; o < kUnsignedBins; ++o) {
        const double s = hc[o] + hc[o + kUnsignedBins];
        double sum = 0.0;
        for (int i = 0; i < 4; ++i) sum += std::min(s * n[i], kTruncation);
        out.at(kSignedBins + o, r, c) = 0.5 * sum;
      }
      for (int i = 0; i < 4; ++i) out.at(kSignedBins + kUnsignedBins + i, r, c) = 0.2357 * texture[i];
    }
  }
  return out;
}

FeatureMap color_hist(const Frame& patch, int cell_size, int bins_per_channel) {
  if (patch.channels() != 3)
    throw std::invalid_argument("color_hist: requires a 3-channel patch (convert gray input with to_rgb)");
  if (cell_size < 1 || bins_per_channel < 1 || bins_per_channel > 256)
    throw std::invalid_argument("color_hist: invalid cell size or bin count");
  const int rows = patch.height() / cell_size;
  const int cols = patch.width() / cell_size;
  if (rows < 1 || cols < 1) throw std::invalid_argument("color_hist: patch smaller than one cell");

  const int b = bins_per_channel;
  FeatureMap out(rows, cols, b * b * b, cell_size);
  const double unit = 1.0 / (static_cast<double>(cell_size) * cell_size);
  for (int y = 0; y < rows * cell_size; ++y) {
    for (int x = 0; x < cols * cell_size; ++x) {
      const int br = patch.at(x, y, 0) * b / 256;
      const int bg = patch.at(x, y, 1) * b / 256;
      const int bb = patch.at(x, y, 2) * b / 256;
      out.at((br * b + bg) * b + bb, y / cell_size, x / cell_size) += unit;
    }
  }
  return out;
}

int lbp_uniform_bin(int code) {
  static const std::array<int, 256> table = [] {
    std::array<int, 256> t{};
    int next = 0;
    for (int c = 0; c < 256; ++c) {
      const auto rotated = static_cast<unsigned>(((c << 1) | (c >> 7)) & 0xFF);
      const int transitions = std::popcount(static_cast<unsigned>(c) ^ rotated);
      t[c] = transitions <= 2 ? next++ : kLbpChannels - 1;
    }
    return t;
  }();
  return table[static_cast<std::size_t>(code & 0xFF)];
}

FeatureMap lbp_hist(const Frame& gray_patch, int cell_size) {
  if (gray_patch.channels() != 1) throw std::invalid_argument("lbp_hist: requires a grayscale patch");
  if (gray_patch.width() < 3 || gray_patch.height() < 3) throw std::invalid_argument("lbp_hist: patch smaller than 3x3");
  if (cell_size < 1) throw std::invalid_argument("lbp_hist: cell_size must be >= 1");
  const int rows = gray_patch.height() / cell_size;
  const int cols = gray_patch.width() / cell_size;
  if (rows < 1 || cols < 1) throw std::invalid_argument("lbp_hist: patch smaller than one cell");

  // Neighbours clockwise from the top-left.
  static constexpr std::array<int, 8> kDx = {-1, 0, 1, 1, 1, 0, -1, -1};
  static constexpr std::array<int, 8> kDy = {-1, -1, -1, 0, 1, 1, 1, 0};

  FeatureMap out(rows, cols, kLbpChannels, cell_size);
  std::vector<int> counts(static_cast<std::size_t>(rows) * cols, 0);
  const int w = gray_patch.width();
  const int h = gray_patch.height();
  for (int y = 1; y < std::min(h - 1, rows * cell_size); ++y) {
    for (int x = 1; x < std::min(w - 1, cols * cell_size); ++x) {
      const int center = gray_patch.at(x, y);
      int code = 0;
      for (int k = 0; k < 8; ++k) {
        if (gray_patch.at(x + kDx[k], y + kDy[k]) >= center) code |= 1 << k;
      }
      const int r = y / cell_size;
      const int c = x / cell_size;
      out.at(lbp_uniform_bin(code), r, c) += 1.0;
      ++counts[static_cast<std::size_t>(r) * cols + c];
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int n = counts[static_cast<std::size_t>(r) * cols + c];
      if (n == 0) {
        // Cell made only of border pixels (cell_size 1).
        out.at(kLbpChannels - 1, r, c) = 1.0;
        continue;
      }
      for (int k = 0; k < kLbpChannels; ++k) out.at(k, r, c) /= n;
    }
  }
  return out;
}

std::vector<double> hann_window(int rows, int cols) {
  auto hann1d = [](int n) {
    std::vector<double> v(static_cast<std::size_t>(n), 1.0);
    if (n > 1) {
      for (int i = 0; i < n; ++i) v[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
    }
    return v;
  };
  const auto wr = hann1d(rows);
  const auto wc = hann1d(cols);
  std::vector<double> out(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out[static_cast<std::size_t>(r) * cols + c] = wr[r] * wc[c];
  }
  return out;
}

void apply_hann_window(FeatureMap& map) {
  const auto window = hann_window(map.rows, map.cols);
  for (int k = 0; k < map.channels; ++k) {
    auto p = map.plane(k);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] *= window[i];
  }
}

}  // namespace brcf
