#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "brcf/bbox_regression.hpp"
#include "brcf/config.hpp"
#include "brcf/fusion.hpp"
#include "brcf/media_io.hpp"
#include "brcf/surf.hpp"

namespace brcf {

/// Raised when the box collapses or the input no longer matches the tracker.
class TrackingFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wall-clock milliseconds spent in each stage of one frame.
struct StageTimings {
  double features = 0.0;
  double detect = 0.0;
  double fusion = 0.0;
  double scale = 0.0;
  double regression = 0.0;
  double update = 0.0;
};

struct FrameResult {
  int frame = 0;
  BBox box;
  /// KL of the HOG, colour and LBP responses; +inf for disabled sub-models.
  Triple kl{};
  Triple eta{};
  /// Fusion weights after this frame's update.
  Triple weights{};
  double scale = 1.0;
  BoxDeltas deltas{};
  double peak = 0.0;
  int matches = 0;
  double elapsed_ms = 0.0;
  StageTimings timings;
};

class Tracker {
 public:
  Tracker(const Frame& first, const BBox& box, TrackerConfig config);

  /// Runs the configured pipeline on the next frame.
  FrameResult step(const Frame& frame);
  /// HOG-only KCF: translation from one filter, fixed box size.
  FrameResult step_kcf_baseline(const Frame& frame);

  /// Response of the fused model on `frame` around the current box, without updating.
  ResponseMap peek_response(const Frame& frame) const;

  const BBox& box() const { return box_; }
  int frame_index() const { return t_; }
  const FusionWeights& fusion() const { return fusion_; }
  const TrackerConfig& config() const { return config_; }
  const RegressorWeights& regressor() const { return regressor_; }
  std::optional<int> p_cells() const { return p_cells_; }
  int grid_rows() const { return grid_h_ / config_.cell_size; }
  int grid_cols() const { return grid_w_ / config_.cell_size; }
  /// Frame pixels per response cell along x and y for the current box.
  double pixels_per_cell_x() const;
  double pixels_per_cell_y() const;

 private:
  struct Features {
    FeatureMap hog;
    FeatureMap color;
    FeatureMap lbp;
  };

  bool enabled(int model) const;
  Features extract(const Frame& frame, const BBox& box) const;
  std::array<ResponseMap, 3> detect_all(const Features& f) const;
  BBox translate(const BBox& box, const ResponseMap& fused) const;
  void retrain(const Frame& frame, const BBox& box);
  void check_frame(const Frame& frame) const;
  BBox finish_box(BBox box) const;
  DescribedKeypoints keypoints_near(const Frame& frame, const BBox& box) const;
  void train_regressor_at_init(const Frame& frame, const BBox& box);

  TrackerConfig config_;
  int frame_w_ = 0;
  int frame_h_ = 0;
  int frame_channels_ = 0;
  /// Window size relative to the box, fixed at init.
  double window_kx_ = 1.0;
  double window_ky_ = 1.0;
  int grid_w_ = 0;
  int grid_h_ = 0;
  LabelMap label_;
  std::optional<int> p_cells_;
  std::array<FilterModel, 3> models_;
  FusionWeights fusion_;
  RegressorWeights regressor_;
  DescribedKeypoints keypoints_;
  BBox box_;
  int t_ = 1;
};

}  // namespace brcf
