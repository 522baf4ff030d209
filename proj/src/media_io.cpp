#include "brcf/media_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace brcf {

namespace fs = std::filesystem;

Frame::Frame(int width, int height, int channels)
    : Frame(width, height, channels,
            std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                      std::max(height, 0) * std::max(channels, 0))) {}

Frame::Frame(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("Frame: dimensions must be positive");
  if (channels != 1 && channels != 3) throw std::invalid_argument("Frame: channels must be 1 or 3");
  if (data_.size() != static_cast<std::size_t>(width) * height * channels)
    throw std::invalid_argument("Frame: data length does not match width * height * channels");
}

std::uint8_t Frame::clamped(int x, int y, int c) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return at(x, y, c);
}

IntegralImage::IntegralImage(const Frame& gray) : width_(gray.width()), height_(gray.height()) {
  if (gray.channels() != 1) throw std::invalid_argument("integral_image: expects a 1-channel frame");
  table_.assign(static_cast<std::size_t>(width_ + 1) * (height_ + 1), 0);
  for (int y = 0; y < height_; ++y) {
    std::int64_t row_sum = 0;
    for (int x = 0; x < width_; ++x) {
      row_sum += gray.at(x, y);
      table_[static_cast<std::size_t>(y + 1) * (width_ + 1) + x + 1] = entry(y, x + 1) + row_sum;
    }
  }
}

Sequence Sequence::from_frames(std::string id, std::vector<Frame> frames,
                               std::vector<BBox> ground_truth, double frame_rate) {
  if (frames.empty()) throw std::invalid_argument("Sequence: no frames");
  if (ground_truth.empty()) throw std::invalid_argument("Sequence: missing frame-1 ground truth");
  if (ground_truth.size() > frames.size())
    throw std::invalid_argument("Sequence: more ground-truth boxes than frames");
  Sequence s;
  s.id_ = std::move(id);
  s.frames_ = std::move(frames);
  s.ground_truth_ = std::move(ground_truth);
  s.frame_rate_ = frame_rate;
  return s;
}

Sequence Sequence::from_files(std::string id, std::vector<fs::path> files,
                              std::vector<BBox> ground_truth, double frame_rate) {
  if (files.empty()) throw std::invalid_argument("Sequence: no frames");
  if (ground_truth.empty()) throw std::invalid_argument("Sequence: missing frame-1 ground truth");
  if (ground_truth.size() > files.size())
    throw std::invalid_argument("Sequence: more ground-truth boxes than frames");
  Sequence s;
  s.id_ = std::move(id);
  s.files_ = std::move(files);
  s.ground_truth_ = std::move(ground_truth);
  s.frame_rate_ = frame_rate;
  return s;
}

Frame Sequence::frame(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("Sequence: frame index out of range");
  if (!files_.empty()) return read_image(files_[index]);
  return frames_[index];
}

BBox parse_groundtruth_line(const std::string& line) {
  std::string cleaned = line;
  std::replace_if(cleaned.begin(), cleaned.end(), [](char c) { return c == ',' || c == '\t'; }, ' ');
  std::istringstream in(cleaned);
  double v[4];
  for (double& x : v) {
    if (!(in >> x)) throw std::runtime_error("unparsable ground-truth line: '" + line + "'");
  }
  if (!(v[2] > 0.0 && v[3] > 0.0))
    throw std::runtime_error("ground-truth box with non-positive size: '" + line + "'");
  return BBox::from_corner(v[0], v[1], v[2], v[3]);
}

namespace {

bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

}  // namespace

Sequence load_sequence(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("missing sequence directory: " + dir.string());
  const fs::path img_dir = dir / "img";
  if (!fs::is_directory(img_dir)) throw std::runtime_error("missing image directory: " + img_dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(img_dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("zero frames in " + img_dir.string());

  const fs::path gt_path = dir / "groundtruth_rect.txt";
  std::ifstream gt(gt_path);
  if (!gt) throw std::runtime_error("missing ground truth: " + gt_path.string());
  std::vector<BBox> boxes;
  std::string line;
  while (std::getline(gt, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (boxes.empty()) throw std::runtime_error("missing ground truth for frame 1");
      continue;
    }
    boxes.push_back(parse_groundtruth_line(line));
  }
  if (boxes.empty()) throw std::runtime_error("missing ground truth for frame 1");
  if (boxes.size() > files.size())
    throw std::runtime_error("ground truth has more lines than there are frames");

  const Frame first = read_image(files.front());
  const BBox& b0 = boxes.front();
  if (b0.left() < -0.5 || b0.top() < -0.5 || b0.right() > first.width() + 0.5 ||
      b0.bottom() > first.height() + 0.5)
    throw std::runtime_error("frame-1 ground truth lies outside the frame bounds");
  for (const auto& b : boxes) {
    if (b.right() <= 0.0 || b.bottom() <= 0.0 || b.left() >= first.width() || b.top() >= first.height())
      throw std::runtime_error("ground-truth box outside the frame bounds");
  }
  return Sequence::from_files(dir.filename().string(), std::move(files), std::move(boxes));
}

Patch extract_patch(const Frame& frame, const BBox& box, int padding) {
  if (!(box.w > 0.0 && box.h > 0.0)) throw std::invalid_argument("extract_patch: non-positive box dimensions");
  if (padding < 0) throw std::invalid_argument("extract_patch: negative padding");
  const int tw = std::max(1, static_cast<int>(std::floor(box.w + 0.5)));
  const int th = std::max(1, static_cast<int>(std::floor(box.h + 0.5)));
  const int x0 = static_cast<int>(std::floor(box.cx - tw / 2.0 + 0.5)) - padding;
  const int y0 = static_cast<int>(std::floor(box.cy - th / 2.0 + 0.5)) - padding;
  const int pw = tw + 2 * padding;
  const int ph = th + 2 * padding;
  const int ch = frame.channels();

  Frame pixels(pw, ph, ch);
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) {
      for (int c = 0; c < ch; ++c) pixels.at(x, y, c) = frame.clamped(x0 + x, y0 + y, c);
    }
  }
  return Patch{std::move(pixels), x0, y0, box, padding};
}

Frame resample_window(const Frame& frame, double cx, double cy, double win_w, double win_h,
                      int out_w, int out_h) {
  if (out_w <= 0 || out_h <= 0 || !(win_w > 0.0) || !(win_h > 0.0))
    throw std::invalid_argument("resample_window: invalid window");
  const int ch = frame.channels();
  Frame out(out_w, out_h, ch);
  const double sx = win_w / out_w;
  const double sy = win_h / out_h;
  const double left = cx - win_w / 2.0;
  const double top = cy - win_h / 2.0;
  const double max_x = frame.width() - 1;
  const double max_y = frame.height() - 1;

  std::vector<int> xi0(out_w), xi1(out_w);
  std::vector<double> xf(out_w);
  for (int x = 0; x < out_w; ++x) {
    const double fx = std::clamp(left + (x + 0.5) * sx - 0.5, 0.0, max_x);
    xi0[x] = static_cast<int>(fx);
    xi1[x] = std::min(xi0[x] + 1, frame.width() - 1);
    xf[x] = fx - xi0[x];
  }
  for (int y = 0; y < out_h; ++y) {
    const double fy = std::clamp(top + (y + 0.5) * sy - 0.5, 0.0, max_y);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, frame.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double wx = xf[x];
      for (int c = 0; c < ch; ++c) {
        const double top_v = frame.at(xi0[x], y0, c) * (1.0 - wx) + frame.at(xi1[x], y0, c) * wx;
        const double bot_v = frame.at(xi0[x], y1, c) * (1.0 - wx) + frame.at(xi1[x], y1, c) * wx;
        const double v = top_v * (1.0 - wy) + bot_v * wy;
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

Frame to_grayscale(const Frame& frame) {
  if (frame.channels() == 1) return frame;
  Frame gray(frame.width(), frame.height(), 1);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const double l = 0.299 * frame.at(x, y, 0) + 0.587 * frame.at(x, y, 1) + 0.114 * frame.at(x, y, 2);
      gray.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(l + 0.5), 0.0, 255.0));
    }
  }
  return gray;
}

Frame to_rgb(const Frame& frame) {
  if (frame.channels() == 3) return frame;
  Frame rgb(frame.width(), frame.height(), 3);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const auto v = frame.at(x, y);
      for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = v;
    }
  }
  return rgb;
}

IntegralImage integral_image(const Frame& gray) { return IntegralImage(gray); }

int default_padding(const BBox& box, double padding_factor) {
  return static_cast<int>(std::floor(padding_factor * std::sqrt(box.w * box.h) + 0.5));
}

}  // namespace brcf
