#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "brcf/media_io.hpp"

namespace brcf {

/// Textured rectangle moving over a static textured background.
struct SynthSpec {
  std::string id = "synthetic";
  int width = 320;
  int height = 240;
  int frames = 100;
  BBox start{160.0, 120.0, 40.0, 40.0};
  /// Centre velocity in pixels per frame.
  double vx = 0.0;
  double vy = 0.0;
  /// Size multiplier per frame.
  double growth = 1.0;
  /// Standard deviation of the additive Gaussian pixel noise.
  double noise_sigma = 2.0;
  /// Lattice cells across the target texture.
  int texture_cells = 8;
};

/// Analytic box for every frame: centre start + t * v, size start * growth^t.
std::vector<BBox> synth_ground_truth(const SynthSpec& spec);

/// Renders the frames; identical output for identical (spec, seed). Throws if the target
/// leaves the frame at any time.
Sequence synth_sequence(const SynthSpec& spec, std::uint64_t seed);

SynthSpec translation_spec();
SynthSpec growth_spec();
SynthSpec static_spec();
/// Named specs used by `eval` and `bench` when no sequences are given.
std::vector<SynthSpec> builtin_suite();

/// Writes `dir/img/0001.ppm ...` and `dir/groundtruth_rect.txt` (x,y,w,h top-left form).
void write_sequence(const Sequence& sequence, const std::filesystem::path& dir);

}  // namespace brcf
