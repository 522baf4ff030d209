#include "brcf/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <random>
#include <stdexcept>

namespace brcf {

namespace {

// Smoothly interpolated random colours on a (cells + 1)^2 lattice over [0, 1]^2.
class ValueNoise {
 public:
  ValueNoise(int cells, double lo, double hi, std::mt19937_64& rng) : cells_(cells) {
    std::uniform_real_distribution<double> d(lo, hi);
    lattice_.resize(static_cast<std::size_t>(cells + 1) * (cells + 1));
    for (auto& c : lattice_) c = {d(rng), d(rng), d(rng)};
  }

  std::array<double, 3> at(double u, double v) const {
    const double fu = std::clamp(u, 0.0, 1.0) * cells_;
    const double fv = std::clamp(v, 0.0, 1.0) * cells_;
    const int i = std::min(static_cast<int>(fu), cells_ - 1);
    const int j = std::min(static_cast<int>(fv), cells_ - 1);
    const double a = smooth(fu - i), b = smooth(fv - j);
    std::array<double, 3> out{};
    for (int c = 0; c < 3; ++c) {
      const double top = node(i, j)[c] * (1.0 - a) + node(i + 1, j)[c] * a;
      const double bot = node(i, j + 1)[c] * (1.0 - a) + node(i + 1, j + 1)[c] * a;
      out[c] = top * (1.0 - b) + bot * b;
    }
    return out;
  }

 private:
  static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
  const std::array<double, 3>& node(int i, int j) const { return lattice_[static_cast<std::size_t>(j) * (cells_ + 1) + i]; }

  int cells_;
  std::vector<std::array<double, 3>> lattice_;
};

// Length of [a0, a1] covered by [b0, b1].
double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

}  // namespace

std::vector<BBox> synth_ground_truth(const SynthSpec& spec) {
  if (spec.frames < 1) throw std::invalid_argument("synth: at least one frame required");
  if (!spec.start.valid()) throw std::invalid_argument("synth: invalid start box");
  if (!(spec.growth > 0.0)) throw std::invalid_argument("synth: growth must be positive");
  std::vector<BBox> gt;
  gt.reserve(spec.frames);
  for (int t = 0; t < spec.frames; ++t) {
    const double g = std::pow(spec.growth, t);
    gt.push_back({spec.start.cx + t * spec.vx, spec.start.cy + t * spec.vy, spec.start.w * g, spec.start.h * g});
  }
  return gt;
}

Sequence synth_sequence(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.width < 16 || spec.height < 16) throw std::invalid_argument("synth: frame too small");
  if (spec.texture_cells < 1) throw std::invalid_argument("synth: texture_cells must be >= 1");
  const auto gt = synth_ground_truth(spec);
  for (std::size_t t = 0; t < gt.size(); ++t) {
    const BBox& b = gt[t];
    if (b.left() < 0.0 || b.top() < 0.0 || b.right() > spec.width || b.bottom() > spec.height)
      throw std::invalid_argument("synth: target leaves the frame at frame " + std::to_string(t));
  }

  std::mt19937_64 rng(seed);
  const ValueNoise bg_coarse(std::max(2, spec.width / 40), 50.0, 170.0, rng);
  const ValueNoise bg_fine(std::max(2, spec.width / 12), -25.0, 25.0, rng);
  const ValueNoise fg_coarse(spec.texture_cells, 0.0, 255.0, rng);
  const ValueNoise fg_fine(2 * spec.texture_cells, -50.0, 50.0, rng);

  std::vector<double> background(static_cast<std::size_t>(spec.width) * spec.height * 3);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double u = (x + 0.5) / spec.width, v = (y + 0.5) / spec.height;
      const auto c = bg_coarse.at(u, v);
      const auto f = bg_fine.at(u, v);
      for (int ch = 0; ch < 3; ++ch) background[(static_cast<std::size_t>(y) * spec.width + x) * 3 + ch] = c[ch] + f[ch];
    }
  }

  std::vector<Frame> frames;
  frames.reserve(gt.size());
  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  for (std::size_t t = 0; t < gt.size(); ++t) {
    const BBox& b = gt[t];
    std::mt19937_64 frame_rng(seed ^ (0x9E3779B97F4A7C15ULL * (t + 1)));
    Frame frame(spec.width, spec.height, 3);
    for (int y = 0; y < spec.height; ++y) {
      const double cov_y = overlap(y, y + 1.0, b.top(), b.bottom());
      for (int x = 0; x < spec.width; ++x) {
        const double cov = cov_y > 0.0 ? cov_y * overlap(x, x + 1.0, b.left(), b.right()) : 0.0;
        std::array<double, 3> px{};
        const std::size_t base = (static_cast<std::size_t>(y) * spec.width + x) * 3;
        for (int ch = 0; ch < 3; ++ch) px[ch] = background[base + ch];
        if (cov > 0.0) {
          const double u = (x + 0.5 - b.left()) / b.w;
          const double v = (y + 0.5 - b.top()) / b.h;
          const auto c = fg_coarse.at(u, v);
          const auto f = fg_fine.at(u, v);
          for (int ch = 0; ch < 3; ++ch) px[ch] = (1.0 - cov) * px[ch] + cov * (c[ch] + f[ch]);
        }
        for (int ch = 0; ch < 3; ++ch) {
          const double value = px[ch] + (spec.noise_sigma > 0.0 ? noise(frame_rng) : 0.0);
          frame.at(x, y, ch) = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
        }
      }
    }
    frames.push_back(std::move(frame));
  }
  return Sequence::from_frames(spec.id, std::move(frames), gt);
}

SynthSpec translation_spec() {
  SynthSpec s;
  s.id = "translate";
  s.width = 400;
  s.height = 240;
  s.frames = 100;
  s.start = {40.0, 120.0, 40.0, 40.0};
  s.vx = 3.0;
  return s;
}

SynthSpec growth_spec() {
  SynthSpec s;
  s.id = "grow";
  s.frames = 121;
  s.start = {160.0, 120.0, 40.0, 40.0};
  s.growth = 1.005;
  return s;
}

SynthSpec static_spec() {
  SynthSpec s;
  s.id = "static";
  s.frames = 30;
  return s;
}

std::vector<SynthSpec> builtin_suite() {
  SynthSpec diagonal;
  diagonal.id = "diagonal";
  diagonal.frames = 100;
  diagonal.start = {60.0, 60.0, 36.0, 36.0};
  diagonal.vx = 1.5;
  diagonal.vy = 1.0;
  SynthSpec shrink;
  shrink.id = "shrink";
  shrink.frames = 100;
  shrink.start = {160.0, 120.0, 64.0, 48.0};
  shrink.growth = 0.995;
  shrink.vx = 0.5;
  return {translation_spec(), growth_spec(), diagonal, shrink};
}

void write_sequence(const Sequence& sequence, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "img");
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.ppm", i + 1);
    write_image(dir / "img" / name, sequence.frame(i));
  }
  std::ofstream gt(dir / "groundtruth_rect.txt");
  if (!gt) throw std::runtime_error("cannot write ground truth in " + dir.string());
  gt << std::setprecision(10);
  for (const auto& b : sequence.ground_truth()) gt << b.left() << ',' << b.top() << ',' << b.w << ',' << b.h << '\n';
}

}  // namespace brcf
