#include "brcf/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace brcf {

EvalRecord make_record(std::string sequence, int frame, const BBox& predicted, const BBox& truth, double elapsed_ms) {
  return {std::move(sequence), frame, predicted, truth, iou(predicted, truth), center_distance(predicted, truth),
          elapsed_ms};
}

std::vector<double> default_success_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 20; ++i) t.push_back(i * 0.05);
  return t;
}

std::vector<double> default_precision_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(i);
  return t;
}

namespace {

template <typename Pred>
std::vector<CurvePoint> curve(const std::vector<EvalRecord>& records, const std::vector<double>& thresholds,
                              Pred pred, const char* what) {
  if (records.empty()) throw std::invalid_argument(std::string(what) + ": no records");
  std::vector<CurvePoint> out;
  out.reserve(thresholds.size());
  for (double th : thresholds) {
    std::size_t hits = 0;
    for (const auto& r : records) hits += pred(r, th) ? 1 : 0;
    out.push_back({th, static_cast<double>(hits) / static_cast<double>(records.size())});
  }
  return out;
}

double mean_rate(const std::vector<CurvePoint>& c) {
  double s = 0.0;
  for (const auto& p : c) s += p.rate;
  return c.empty() ? 0.0 : s / static_cast<double>(c.size());
}

}  // namespace

std::vector<CurvePoint> success_curve(const std::vector<EvalRecord>& records, const std::vector<double>& thresholds) {
  return curve(records, thresholds, [](const EvalRecord& r, double th) { return r.iou > th; }, "success_curve");
}

std::vector<CurvePoint> precision_curve(const std::vector<EvalRecord>& records, const std::vector<double>& thresholds) {
  return curve(records, thresholds, [](const EvalRecord& r, double th) { return r.distance < th; }, "precision_curve");
}

double mean_iou(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw std::invalid_argument("mean_iou: no records");
  double s = 0.0;
  for (const auto& r : records) s += r.iou;
  return s / static_cast<double>(records.size());
}

double mean_distance(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw std::invalid_argument("mean_distance: no records");
  double s = 0.0;
  for (const auto& r : records) s += r.distance;
  return s / static_cast<double>(records.size());
}

Summary summarize(const std::string& method, const std::vector<EvalRecord>& records, double fps) {
  Summary s;
  s.method = method;
  s.frames = records.size();
  s.average_overlap = mean_iou(records);
  s.average_distance = mean_distance(records);
  s.average_success = mean_rate(success_curve(records, default_success_thresholds()));
  s.average_precision = mean_rate(precision_curve(records, default_precision_thresholds()));
  s.fps = fps;
  return s;
}

std::string format_summary_table(const std::vector<Summary>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %8s %12s %12s %12s %12s %9s\n", "method", "frames", "avg_overlap",
                "avg_distance", "avg_success", "avg_precision", "fps");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-10s %8zu %12.4f %12.2f %12.4f %12.4f %9.2f\n", r.method.c_str(), r.frames,
                  r.average_overlap, r.average_distance, r.average_success, r.average_precision, r.fps);
    os << line;
  }
  return os.str();
}

double TrackRun::fps() const {
  if (total_ms <= 0.0) return 0.0;
  return static_cast<double>(frames.size() + 1) / (total_ms / 1000.0);
}

TrackRun run_tracker(const Sequence& sequence, const TrackerConfig& config) {
  if (sequence.size() == 0) throw std::invalid_argument("run_tracker: empty sequence");
  const auto& gt = sequence.ground_truth();
  if (gt.empty()) throw std::invalid_argument("run_tracker: sequence has no initial box");

  TrackRun run;
  run.sequence = sequence.id();
  const Frame first = sequence.frame(0);
  const auto t0 = std::chrono::steady_clock::now();
  Tracker tracker(first, gt.front(), config);
  run.init_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  run.total_ms = run.init_ms;
  run.records.push_back(make_record(sequence.id(), 0, gt.front(), gt.front(), run.init_ms));

  BBox last = gt.front();
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    const Frame frame = sequence.frame(i);
    double elapsed = 0.0;
    if (!run.failed) {
      try {
        FrameResult fr = tracker.step(frame);
        elapsed = fr.elapsed_ms;
        last = fr.box;
        run.total_ms += elapsed;
        run.frames.push_back(std::move(fr));
      } catch (const TrackingFailure& e) {
        run.failed = true;
        run.failure = e.what();
      }
    }
    if (i < gt.size()) run.records.push_back(make_record(sequence.id(), static_cast<int>(i), last, gt[i], elapsed));
  }
  return run;
}

std::vector<TrainingPair> sequence_training_pairs(const Sequence& sequence, std::size_t samples_per_frame,
                                                  std::size_t stride, std::uint64_t seed,
                                                  const SamplingParams& sampling,
                                                  const RegressionFeatureParams& features) {
  if (stride == 0) throw std::invalid_argument("stride must be positive");
  const auto& gt = sequence.ground_truth();
  const std::size_t n = std::min(gt.size(), sequence.size());
  std::vector<TrainingPair> pairs;
  for (std::size_t t = 0; t < n; t += stride) {
    const Frame frame = sequence.frame(t);
    for (const BBox& s : sample_training_boxes(gt[t], samples_per_frame, seed + t, sampling))
      pairs.push_back(make_training_pair(frame, s, gt[t], features));
  }
  return pairs;
}

}  // namespace brcf
