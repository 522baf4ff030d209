#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "brcf/features.hpp"
#include "brcf/media_io.hpp"

namespace brcf::test {

inline Frame random_frame(int w, int h, int channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 255);
  Frame f(w, h, channels);
  for (auto& v : f.data()) v = static_cast<std::uint8_t>(pick(rng));
  return f;
}

inline FeatureMap random_map(int rows, int cols, int channels, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick(lo, hi);
  FeatureMap m(rows, cols, channels);
  for (auto& v : m.values) v = pick(rng);
  return m;
}

/// Content moved by (dy, dx): out(r, c) = in(r - dy, c - dx), circularly.
inline FeatureMap cshift(const FeatureMap& in, int dy, int dx) {
  FeatureMap out(in.rows, in.cols, in.channels, in.cell_size);
  for (int k = 0; k < in.channels; ++k)
    for (int r = 0; r < in.rows; ++r)
      for (int c = 0; c < in.cols; ++c) {
        const int sr = ((r - dy) % in.rows + in.rows) % in.rows;
        const int sc = ((c - dx) % in.cols + in.cols) % in.cols;
        out.at(k, r, c) = in.at(k, sr, sc);
      }
  return out;
}

/// Smooth random texture: sum of a few random sinusoids, 8-bit gray.
inline Frame smooth_texture(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(0.05, 0.35), phase(0.0, 6.283185307179586);
  Frame f(w, h, 1);
  double a[6], b[6], p[6];
  for (int i = 0; i < 6; ++i) {
    a[i] = freq(rng);
    b[i] = freq(rng);
    p[i] = phase(rng);
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = 0.0;
      for (int i = 0; i < 6; ++i) v += std::sin(a[i] * x + b[i] * y + p[i]);
      f.at(x, y) = static_cast<std::uint8_t>(std::clamp(128.0 + 20.0 * v, 0.0, 255.0));
    }
  return f;
}

}  // namespace brcf::test
