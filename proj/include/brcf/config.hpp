#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace brcf {

enum class TrackerMode { Brcf, Kcf };

struct TrackerConfig {
  TrackerMode mode = TrackerMode::Brcf;

  // Correlation filters.
  int cell_size = 4;
  double padding_factor = 0.75;
  /// Longest side of the resampled search window in pixels.
  int template_size = 96;
  double sigma_k = 0.5;
  double sigma_label_factor = 0.1;
  double lambda = 1e-4;
  double alpha = 0.02;
  bool literal_update = false;
  bool subcell_peak = true;
  /// Local-region radius in cells; unset derives it from the padding.
  std::optional<int> p_cells;
  bool use_local_mask = true;

  // Fusion.
  double lambda_w = 0.025;
  bool use_color = true;
  bool use_lbp = true;
  int color_bins = 4;

  // Scale pre-estimation.
  bool use_scale = true;
  double surf_threshold = 1e-4;
  int surf_max_points = 200;
  double ratio_test = 0.7;
  double scale_clamp_lo = 0.8;
  double scale_clamp_hi = 1.25;
  int min_matches = 4;
  /// Centroid-to-centre distance below which the ratio is not trusted: the larger of the
  /// absolute value in pixels and the relative value times sqrt(w * h).
  double scale_min_distance = 1.0;
  double scale_min_distance_rel = 0.05;
  bool upright = false;
  /// Keypoint images are downsampled so their longest side stays below this.
  int keypoint_max_side = 256;

  // Box regression.
  bool use_regressor = true;
  bool literal_regression = false;
  std::string regressor_path;
  double regressor_lambda = 100.0;
  double regressor_lr = 0.0;
  int regressor_iters_offline = 500;
  int regressor_iters_finetune = 50;
  /// First-frame samples used for fine-tuning.
  int regressor_samples = 8;
  /// First-frame samples used when no pretrained regressor is supplied.
  int regressor_offline_samples = 64;
  double iou_min = 0.6;

  std::uint64_t seed = 1;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and bad values throw.
TrackerConfig parse_config(const std::string& text, TrackerConfig base = {});
TrackerConfig load_config(const std::filesystem::path& path, TrackerConfig base = {});
/// Applies one key/value pair.
void set_config_value(TrackerConfig& config, const std::string& key, const std::string& value);
void validate_config(const TrackerConfig& config);

TrackerMode parse_mode(const std::string& text);
std::string mode_name(TrackerMode mode);

/// Settings for the plain KCF baseline: HOG only, no mask, no scale or regression.
TrackerConfig kcf_baseline(TrackerConfig config);

}  // namespace brcf
