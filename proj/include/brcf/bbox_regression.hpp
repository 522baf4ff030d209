#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "brcf/bbox.hpp"
#include "brcf/media_io.hpp"

namespace brcf {

/// (t_x, t_y, t_w, t_h): centre offsets relative to the sample size, log size ratios.
using BoxDeltas = std::array<double, 4>;

BoxDeltas regression_targets(const BBox& sample, const BBox& truth);

/// Inverse of regression_targets. With `literal` the centre offsets are scaled by the box
/// centre coordinates instead of its size.
BBox apply_targets(const BBox& sample, const BoxDeltas& t, bool literal = false);

struct SamplingParams {
  double center_jitter = 0.15;
  double scale_lo = 0.85;
  double scale_hi = 1.18;
  double iou_min = 0.6;
  int max_attempts = 10000;
};

/// `n` boxes jittered around `truth`, each with IoU >= iou_min. Deterministic for a seed.
std::vector<BBox> sample_training_boxes(const BBox& truth, int n, std::uint64_t seed,
                                        const SamplingParams& params = {});

struct RegressionFeatureParams {
  int patch_size = 64;
  int cell_size = 8;
  /// Extra context around the box on each side, as a fraction of its size.
  double context = 0.25;
};

/// Flattened HOG of the box resampled to a canonical square patch.
std::vector<double> regression_features(const Frame& frame, const BBox& box, const RegressionFeatureParams& params = {});

std::size_t regression_feature_size(const RegressionFeatureParams& params = {});

struct TrainingPair {
  BBox sample;
  BBox truth;
  std::vector<double> feature;
  BoxDeltas targets{};
};

TrainingPair make_training_pair(const Frame& frame, const BBox& sample, const BBox& truth,
                                const RegressionFeatureParams& params = {});

struct RegressorWeights {
  std::array<std::vector<double>, 4> w;
  std::vector<double> mean;
  std::vector<double> stddev;
  double lambda = 1.0;
  RegressionFeatureParams features;

  std::size_t dim() const { return mean.size(); }
  bool empty() const { return mean.empty(); }
};

struct BgdParams {
  double lambda = 1.0;
  /// Step size; a value <= 0 selects 1 / (2 (L + lambda)) with L the largest Gram eigenvalue.
  double lr = 0.0;
  int iters = 500;
};

/// Four ridge regressions sum_i (t_i - w.F_i)^2 + lambda |w|^2 minimised by batch gradient
/// descent on standardised features. A non-empty `warm_start` continues from its weights and
/// keeps its standardisation. `loss_trace`, when given, receives the summed loss per iteration.
RegressorWeights train_regressor(const std::vector<TrainingPair>& pairs, const BgdParams& params,
                                 const RegressorWeights* warm_start = nullptr,
                                 std::vector<double>* loss_trace = nullptr);

/// sum_i (t_i - w.F_i)^2 + lambda |w|^2 for row-major features (n x d).
double ridge_loss(const std::vector<double>& features, const std::vector<double>& targets, const std::vector<double>& w,
                  double lambda);
/// 2 sum_i (w.F_i - t_i) F_i + 2 lambda w.
std::vector<double> ridge_gradient(const std::vector<double>& features, const std::vector<double>& targets,
                                   const std::vector<double>& w, double lambda);

inline constexpr double kLogScaleClamp = 0.4;

/// Predicted deltas for a raw (unstandardised) feature; size terms clamped to +-0.4.
BoxDeltas predict_deltas(const RegressorWeights& weights, const std::vector<double>& feature);

BBox apply_regressor(const RegressorWeights& weights, const std::vector<double>& feature, const BBox& box,
                     bool literal = false, BoxDeltas* deltas = nullptr);

void save_regressor(const std::filesystem::path& path, const RegressorWeights& weights);
RegressorWeights load_regressor(const std::filesystem::path& path);

}  // namespace brcf
