#pragma once

#include <span>
#include <vector>

#include "brcf/media_io.hpp"

namespace brcf {

/// Real-valued cell grid with `channels` planes, stored plane by plane (row-major per plane).
struct FeatureMap {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  int cell_size = 1;
  std::vector<double> values;

  FeatureMap() = default;
  FeatureMap(int rows, int cols, int channels, int cell_size = 1)
      : rows(rows), cols(cols), channels(channels), cell_size(cell_size),
        values(static_cast<std::size_t>(rows) * cols * channels, 0.0) {}

  std::size_t plane_size() const { return static_cast<std::size_t>(rows) * cols; }
  double& at(int channel, int row, int col) {
    return values[channel * plane_size() + static_cast<std::size_t>(row) * cols + col];
  }
  double at(int channel, int row, int col) const {
    return values[channel * plane_size() + static_cast<std::size_t>(row) * cols + col];
  }
  std::span<double> plane(int channel) { return {values.data() + channel * plane_size(), plane_size()}; }
  std::span<const double> plane(int channel) const {
    return {values.data() + channel * plane_size(), plane_size()};
  }
  bool same_shape(const FeatureMap& o) const {
    return rows == o.rows && cols == o.cols && channels == o.channels;
  }
};

inline constexpr int kHogChannels = 31;
inline constexpr int kLbpChannels = 59;

/// Felzenszwalb HOG: 18 signed + 9 unsigned orientation channels and 4 texture
/// (normalisation-energy) channels per cell, block-normalised with truncation at 0.2.
/// Colour input takes the gradient of the channel with the largest magnitude.
FeatureMap hog(const Frame& patch, int cell_size);

/// Per-cell joint RGB histogram with bins_per_channel^3 channels, each cell summing to 1.
FeatureMap color_hist(const Frame& patch, int cell_size, int bins_per_channel);

/// Per-cell histogram of uniform LBP(8,1) codes: 58 uniform patterns plus one catch-all bin.
/// A neighbour >= centre sets its bit. Pixels on the patch border are skipped.
FeatureMap lbp_hist(const Frame& gray_patch, int cell_size);

/// Histogram bin assigned to an 8-bit LBP code (0..57 uniform, 58 otherwise).
int lbp_uniform_bin(int code);

/// Multiplies every plane by the separable Hann window of the grid.
void apply_hann_window(FeatureMap& map);
std::vector<double> hann_window(int rows, int cols);

}  // namespace brcf
