#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "brcf/bbox.hpp"

namespace brcf {

/// 8-bit image, 1 or 3 interleaved channels, row-major.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, int channels);
  Frame(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  /// Edge-replicating read.
  std::uint8_t clamped(int x, int y, int c = 0) const;

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Pixel block cut around a box: (TH + 2P) x (TW + 2P), origin in frame coordinates.
struct Patch {
  Frame pixels;
  int origin_x = 0;
  int origin_y = 0;
  BBox source;
  int padding = 0;
};

/// Summed-area table with a zero first row and column.
class IntegralImage {
 public:
  IntegralImage() = default;
  explicit IntegralImage(const Frame& gray);

  int width() const { return width_; }
  int height() const { return height_; }

  /// Entry (row, col) of the (height+1) x (width+1) table.
  std::int64_t entry(int row, int col) const {
    return table_[static_cast<std::size_t>(row) * (width_ + 1) + col];
  }

  /// Sum over pixels x in [x0, x1), y in [y0, y1); the rectangle must lie inside the image.
  std::int64_t rect_sum(int x0, int y0, int x1, int y1) const {
    return entry(y1, x1) - entry(y0, x1) - entry(y1, x0) + entry(y0, x0);
  }

  /// Box sum with the rectangle clipped to the image; used by the box filters.
  double box_sum(int row, int col, int rows, int cols) const {
    const int y0 = std::clamp(row, 0, height_);
    const int y1 = std::clamp(row + rows, 0, height_);
    const int x0 = std::clamp(col, 0, width_);
    const int x1 = std::clamp(col + cols, 0, width_);
    if (y1 <= y0 || x1 <= x0) return 0.0;
    return static_cast<double>(rect_sum(x0, y0, x1, y1));
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::int64_t> table_;
};

/// Ordered frames plus ground truth. Frames from disk are decoded on demand.
class Sequence {
 public:
  static Sequence from_frames(std::string id, std::vector<Frame> frames,
                              std::vector<BBox> ground_truth, double frame_rate = 25.0);
  static Sequence from_files(std::string id, std::vector<std::filesystem::path> files,
                             std::vector<BBox> ground_truth, double frame_rate = 25.0);

  const std::string& id() const { return id_; }
  std::size_t size() const { return files_.empty() ? frames_.size() : files_.size(); }
  double frame_rate() const { return frame_rate_; }
  const std::vector<BBox>& ground_truth() const { return ground_truth_; }
  Frame frame(std::size_t index) const;

 private:
  std::string id_;
  std::vector<Frame> frames_;
  std::vector<std::filesystem::path> files_;
  std::vector<BBox> ground_truth_;
  double frame_rate_ = 25.0;
};

/// Reads `<dir>/img/*.{png,ppm,pgm}` and `<dir>/groundtruth_rect.txt` (x,y,w,h top-left form).
Sequence load_sequence(const std::filesystem::path& dir);

/// Parses one ground-truth line; accepts comma, tab or space separators.
BBox parse_groundtruth_line(const std::string& line);

Patch extract_patch(const Frame& frame, const BBox& box, int padding);

/// Bilinear resampling of the window (win_w x win_h, centred at cx, cy) into out_w x out_h
/// pixels. Samples outside the frame replicate the nearest edge.
Frame resample_window(const Frame& frame, double cx, double cy, double win_w, double win_h,
                      int out_w, int out_h);

/// ITU-R BT.601 luminance, rounded. Single-channel input is returned unchanged.
Frame to_grayscale(const Frame& frame);

/// Replicates a gray frame into three channels; colour frames are returned unchanged.
Frame to_rgb(const Frame& frame);

IntegralImage integral_image(const Frame& gray);

/// Default padding: round(0.75 * sqrt(w * h)).
int default_padding(const BBox& box, double padding_factor = 0.75);

// Codecs: binary/ASCII PNM (P2, P3, P5, P6) and PNG.
Frame read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Frame& frame);

}  // namespace brcf
