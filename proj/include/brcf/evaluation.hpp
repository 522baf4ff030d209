#pragma once

#include <string>
#include <vector>

#include "brcf/bbox.hpp"
#include "brcf/bbox_regression.hpp"
#include "brcf/config.hpp"
#include "brcf/media_io.hpp"
#include "brcf/tracker.hpp"

namespace brcf {

struct EvalRecord {
  std::string sequence;
  int frame = 0;
  BBox predicted;
  BBox truth;
  double iou = 0.0;
  double distance = 0.0;
  double elapsed_ms = 0.0;
};

EvalRecord make_record(std::string sequence, int frame, const BBox& predicted, const BBox& truth,
                       double elapsed_ms = 0.0);

struct CurvePoint {
  double threshold = 0.0;
  double rate = 0.0;
};

/// 0, 0.05, ..., 1.
std::vector<double> default_success_thresholds();
/// 0, 1, ..., 50 pixels.
std::vector<double> default_precision_thresholds();

/// Fraction of records with IoU strictly above each threshold.
std::vector<CurvePoint> success_curve(const std::vector<EvalRecord>& records, const std::vector<double>& thresholds);
/// Fraction of records with centre distance strictly below each threshold.
std::vector<CurvePoint> precision_curve(const std::vector<EvalRecord>& records, const std::vector<double>& thresholds);

double mean_iou(const std::vector<EvalRecord>& records);
double mean_distance(const std::vector<EvalRecord>& records);

struct Summary {
  std::string method;
  std::size_t frames = 0;
  double average_overlap = 0.0;
  double average_distance = 0.0;
  /// Mean of the success curve over the default thresholds.
  double average_success = 0.0;
  /// Mean of the precision curve over the default thresholds.
  double average_precision = 0.0;
  double fps = 0.0;
};

Summary summarize(const std::string& method, const std::vector<EvalRecord>& records, double fps = 0.0);
std::string format_summary_table(const std::vector<Summary>& rows);

struct TrackRun {
  std::string sequence;
  std::vector<FrameResult> frames;
  std::vector<EvalRecord> records;
  /// Tracker time only: initialisation plus every step.
  double total_ms = 0.0;
  double init_ms = 0.0;
  bool failed = false;
  std::string failure;

  double fps() const;
};

/// Tracks a whole sequence from its first ground-truth box. After a tracking failure the
/// last box is held for the remaining frames.
TrackRun run_tracker(const Sequence& sequence, const TrackerConfig& config);

/// Jittered regressor training pairs around the ground truth of every `stride`-th frame.
std::vector<TrainingPair> sequence_training_pairs(const Sequence& sequence, std::size_t samples_per_frame,
                                                  std::size_t stride, std::uint64_t seed,
                                                  const SamplingParams& sampling = {},
                                                  const RegressionFeatureParams& features = {});

}  // namespace brcf
