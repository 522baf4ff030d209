#include "brcf/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "brcf/scale_estimation.hpp"

namespace brcf {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr int kHog = 0;
constexpr int kColor = 1;
constexpr int kLbp = 2;
constexpr double kKeypointMargin = 1.5;
constexpr double kMaxKeypointUpsample = 1.0;
// Only points this close to the box (relative to its size) get descriptors.
constexpr double kDescribeMargin = 1.25;
constexpr double kMinBoxSide = 2.0;

bool inside(const Keypoint& kp, const BBox& box) {
  return kp.x >= box.left() && kp.x <= box.right() && kp.y >= box.top() && kp.y <= box.bottom();
}

// Keypoints (and descriptors) that fall inside `box`.
DescribedKeypoints select_inside(const DescribedKeypoints& all, const BBox& box) {
  DescribedKeypoints out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!inside(all.points[i], box)) continue;
    out.points.push_back(all.points[i]);
    out.descriptors.push_back(all.descriptors[i]);
  }
  return out;
}

}  // namespace

Tracker::Tracker(const Frame& first, const BBox& box, TrackerConfig config)
    : config_(config.mode == TrackerMode::Kcf ? kcf_baseline(std::move(config)) : std::move(config)) {
  validate_config(config_);
  if (first.empty()) throw std::invalid_argument("tracker: empty first frame");
  if (!box.valid() || box.w < kMinBoxSide || box.h < kMinBoxSide)
    throw std::invalid_argument("tracker: degenerate initial box");
  if (box.right() <= 0.0 || box.bottom() <= 0.0 || box.left() >= first.width() || box.top() >= first.height())
    throw std::invalid_argument("tracker: initial box lies outside the frame");
  frame_w_ = first.width();
  frame_h_ = first.height();
  frame_channels_ = first.channels();

  const int cell = config_.cell_size;
  const double pad = config_.padding_factor * std::sqrt(box.w * box.h);
  const double win_w = box.w + 2.0 * pad;
  const double win_h = box.h + 2.0 * pad;
  window_kx_ = win_w / box.w;
  window_ky_ = win_h / box.h;
  const double s = config_.template_size / std::max(win_w, win_h);
  grid_w_ = std::max(4, static_cast<int>(std::lround(win_w * s / cell))) * cell;
  grid_h_ = std::max(4, static_cast<int>(std::lround(win_h * s / cell))) * cell;
  const int rows = grid_rows();
  const int cols = grid_cols();

  const double target_cells_x = box.w * (grid_w_ / win_w) / cell;
  const double target_cells_y = box.h * (grid_h_ / win_h) / cell;
  label_ = gaussian_label(rows, cols, config_.sigma_label_factor * std::sqrt(target_cells_x * target_cells_y));

  if (config_.use_local_mask) {
    const int derived = static_cast<int>(std::floor(pad * s / cell));
    p_cells_ = std::clamp(config_.p_cells.value_or(derived), 1, std::min(rows, cols) / 2);
  }

  // Enabled sub-models start with equal weights.
  Triple eta{};
  int n_enabled = 0;
  for (int m = 0; m < 3; ++m) n_enabled += enabled(m) ? 1 : 0;
  for (int m = 0; m < 3; ++m) eta[m] = enabled(m) ? 1.0 / n_enabled : 0.0;
  fusion_ = update_weights(FusionWeights{}, eta, config_.lambda_w);

  box_ = box;
  retrain(first, box);

  if (config_.use_scale) keypoints_ = keypoints_near(first, box);
  if (config_.use_regressor) train_regressor_at_init(first, box);
}

bool Tracker::enabled(int model) const {
  switch (model) {
    case kHog: return true;
    case kColor: return config_.use_color;
    case kLbp: return config_.use_lbp;
    default: return false;
  }
}

double Tracker::pixels_per_cell_x() const { return box_.w * window_kx_ / grid_cols(); }
double Tracker::pixels_per_cell_y() const { return box_.h * window_ky_ / grid_rows(); }

Tracker::Features Tracker::extract(const Frame& frame, const BBox& box) const {
  const Frame patch = resample_window(frame, box.cx, box.cy, box.w * window_kx_, box.h * window_ky_, grid_w_, grid_h_);
  Features f;
  f.hog = hog(patch, config_.cell_size);
  apply_hann_window(f.hog);
  if (config_.use_color) {
    f.color = color_hist(to_rgb(patch), config_.cell_size, config_.color_bins);
    apply_hann_window(f.color);
  }
  if (config_.use_lbp) {
    f.lbp = lbp_hist(to_grayscale(patch), config_.cell_size);
    apply_hann_window(f.lbp);
  }
  return f;
}

std::array<ResponseMap, 3> Tracker::detect_all(const Features& f) const {
  std::array<ResponseMap, 3> out;
  out[kHog] = detect(models_[kHog], f.hog);
  if (config_.use_color) out[kColor] = detect(models_[kColor], f.color);
  if (config_.use_lbp) out[kLbp] = detect(models_[kLbp], f.lbp);
  return out;
}

BBox Tracker::translate(const BBox& box, const ResponseMap& fused) const {
  const CellShift shift = peak_shift(fused, config_.subcell_peak);
  BBox out = box;
  out.cx += shift.dx * box.w * window_kx_ / grid_cols();
  out.cy += shift.dy * box.h * window_ky_ / grid_rows();
  return out;
}

void Tracker::retrain(const Frame& frame, const BBox& box) {
  const Features f = extract(frame, box);
  const FilterParams params{config_.lambda, config_.sigma_k, config_.alpha, p_cells_, config_.literal_update};
  const FeatureMap* maps[3] = {&f.hog, &f.color, &f.lbp};
  for (int m = 0; m < 3; ++m) {
    if (!enabled(m)) continue;
    FilterModel fresh = train_filter(*maps[m], label_, params);
    if (models_[m].empty()) {
      models_[m] = std::move(fresh);
    } else {
      models_[m] = update_model(models_[m], fresh.coeffs, fresh.templ, config_.alpha);
    }
  }
}

void Tracker::check_frame(const Frame& frame) const {
  if (frame.width() != frame_w_ || frame.height() != frame_h_ || frame.channels() != frame_channels_)
    throw TrackingFailure("tracker: frame size differs from the first frame");
}

BBox Tracker::finish_box(BBox box) const {
  if (!box.valid() || box.w < kMinBoxSide || box.h < kMinBoxSide)
    throw TrackingFailure("tracker: box collapsed (tracking failure)");
  box.w = std::min(box.w, static_cast<double>(frame_w_));
  box.h = std::min(box.h, static_cast<double>(frame_h_));
  box.cx = std::clamp(box.cx, 0.0, static_cast<double>(frame_w_));
  box.cy = std::clamp(box.cy, 0.0, static_cast<double>(frame_h_));
  return box;
}

DescribedKeypoints Tracker::keypoints_near(const Frame& frame, const BBox& box) const {
  const double cw = kKeypointMargin * box.w;
  const double ch = kKeypointMargin * box.h;
  const double factor = std::min(kMaxKeypointUpsample, config_.keypoint_max_side / std::max(cw, ch));
  const int out_w = static_cast<int>(std::lround(cw * factor));
  const int out_h = static_cast<int>(std::lround(ch * factor));
  if (out_w < kMinDetectorSide || out_h < kMinDetectorSide) return {};
  const IntegralImage integral(to_grayscale(resample_window(frame, box.cx, box.cy, cw, ch, out_w, out_h)));
  // Crop sample k covers frame positions left + [k, k + 1) / factor.
  const double fx = out_w / cw;
  const double fy = out_h / ch;
  const double left = box.cx - cw / 2.0;
  const double top = box.cy - ch / 2.0;
  const double reach_x = 0.5 * kDescribeMargin * box.w * fx;
  const double reach_y = 0.5 * kDescribeMargin * box.h * fy;
  DescribedKeypoints kps;
  for (Keypoint kp : detect_keypoints(integral, config_.surf_threshold, static_cast<std::size_t>(config_.surf_max_points))) {
    if (std::abs(kp.x + 0.5 - 0.5 * out_w) > reach_x || std::abs(kp.y + 0.5 - 0.5 * out_h) > reach_y) continue;
    if (!config_.upright) kp = assign_orientation(integral, kp);
    kps.descriptors.push_back(describe_keypoint(integral, kp));
    kp.x = left + (kp.x + 0.5) / fx;
    kp.y = top + (kp.y + 0.5) / fy;
    kp.scale /= fx;
    kps.points.push_back(kp);
  }
  return kps;
}

void Tracker::train_regressor_at_init(const Frame& frame, const BBox& box) {
  SamplingParams sampling;
  sampling.iou_min = config_.iou_min;
  auto pairs_for = [&](int n, std::uint64_t seed, const RegressionFeatureParams& fp) {
    std::vector<TrainingPair> pairs;
    for (const BBox& s : sample_training_boxes(box, n, seed, sampling)) pairs.push_back(make_training_pair(frame, s, box, fp));
    return pairs;
  };
  BgdParams bgd{config_.regressor_lambda, config_.regressor_lr, config_.regressor_iters_offline};
  RegressorWeights base;
  if (!config_.regressor_path.empty()) {
    base = load_regressor(config_.regressor_path);
  } else {
    const RegressionFeatureParams fp;
    base = train_regressor(pairs_for(config_.regressor_offline_samples, config_.seed, fp), bgd);
    base.features = fp;
  }
  bgd.iters = config_.regressor_iters_finetune;
  const RegressionFeatureParams fp = base.features;
  regressor_ = train_regressor(pairs_for(config_.regressor_samples, config_.seed + 1, fp), bgd, &base);
  regressor_.features = fp;
}

ResponseMap Tracker::peek_response(const Frame& frame) const {
  check_frame(frame);
  const Features f = extract(frame, box_);
  const auto r = detect_all(f);
  if (!config_.use_color && !config_.use_lbp) return r[kHog];
  return fuse_responses(r[kHog], config_.use_color ? r[kColor] : r[kHog], config_.use_lbp ? r[kLbp] : r[kHog], fusion_);
}

FrameResult Tracker::step(const Frame& frame) {
  if (config_.mode == TrackerMode::Kcf) return step_kcf_baseline(frame);
  check_frame(frame);
  FrameResult res;
  const auto t_start = Clock::now();

  auto t0 = Clock::now();
  const Features f = extract(frame, box_);
  res.timings.features = ms_since(t0);

  t0 = Clock::now();
  const auto responses = detect_all(f);
  res.timings.detect = ms_since(t0);

  t0 = Clock::now();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (int m = 0; m < 3; ++m) res.kl[m] = enabled(m) ? response_reliability(responses[m], label_.sigma) : kInf;
  res.eta = compute_frame_weights(res.kl[0], res.kl[1], res.kl[2]);
  const ResponseMap fused =
      (!config_.use_color && !config_.use_lbp)
          ? responses[kHog]
          : fuse_responses(responses[kHog], config_.use_color ? responses[kColor] : responses[kHog],
                           config_.use_lbp ? responses[kLbp] : responses[kHog], fusion_);
  fusion_ = update_weights(fusion_, res.eta, config_.lambda_w);
  res.weights = fusion_.alpha;
  res.peak = fused.peak_value;
  BBox box = translate(box_, fused);
  res.timings.fusion = ms_since(t0);

  if (config_.use_scale) {
    t0 = Clock::now();
    DescribedKeypoints next_all = keypoints_near(frame, box);
    const DescribedKeypoints prev = select_inside(keypoints_, box_);
    const DescribedKeypoints next = select_inside(next_all, box);
    const MatchPairs pairs = match_keypoints(prev.descriptors, next.descriptors, config_.ratio_test);
    res.matches = static_cast<int>(pairs.size());
    if (!pairs.empty()) {
      const double ppc = 0.5 * (pixels_per_cell_x() + pixels_per_cell_y());
      const ResponseGeometry next_geom{box_.cx, box_.cy, ppc};
      const ResponseGeometry prev_geom{box_.cx - (box.cx - box_.cx), box_.cy - (box.cy - box_.cy), ppc};
      KeypointWeights w = keypoint_weights(fused, pairs, prev.points, next.points, prev_geom, next_geom);
      // Both ends of a match share one weight so an exact similarity gives an exact ratio.
      for (std::size_t i = 0; i < w.prev.size(); ++i) w.prev[i] = w.next[i] = 0.5 * (w.prev[i] + w.next[i]);
      std::vector<Point2> pp, pn;
      for (const auto& m : pairs.pairs) {
        pp.push_back({prev.points[m.prev].x, prev.points[m.prev].y});
        pn.push_back({next.points[m.next].x, next.points[m.next].y});
      }
      const Point2 m_prev = weighted_centroid(pp, w.prev);
      const Point2 m_next = weighted_centroid(pn, w.next);
      const double min_distance =
          std::max(config_.scale_min_distance, config_.scale_min_distance_rel * std::sqrt(box_.w * box_.h));
      const ScaleLimits limits{config_.min_matches, min_distance, config_.scale_clamp_lo, config_.scale_clamp_hi};
      res.scale = estimate_scale(m_prev, {box_.cx, box_.cy}, m_next, {box.cx, box.cy}, res.matches, limits);
    }
    box.w *= res.scale;
    box.h *= res.scale;
    keypoints_ = std::move(next_all);
    res.timings.scale = ms_since(t0);
  }

  if (config_.use_regressor && !regressor_.empty()) {
    t0 = Clock::now();
    const auto feature = regression_features(frame, box, regressor_.features);
    box = apply_regressor(regressor_, feature, box, config_.literal_regression, &res.deltas);
    res.timings.regression = ms_since(t0);
  }

  box = finish_box(box);

  t0 = Clock::now();
  retrain(frame, box);
  res.timings.update = ms_since(t0);

  box_ = box;
  res.box = box;
  res.frame = ++t_;
  res.elapsed_ms = ms_since(t_start);
  return res;
}

FrameResult Tracker::step_kcf_baseline(const Frame& frame) {
  check_frame(frame);
  FrameResult res;
  const auto t_start = Clock::now();

  auto t0 = Clock::now();
  const FeatureMap z = [&] {
    const Frame patch =
        resample_window(frame, box_.cx, box_.cy, box_.w * window_kx_, box_.h * window_ky_, grid_w_, grid_h_);
    FeatureMap m = hog(patch, config_.cell_size);
    apply_hann_window(m);
    return m;
  }();
  res.timings.features = ms_since(t0);

  t0 = Clock::now();
  const ResponseMap r = detect(models_[kHog], z);
  res.timings.detect = ms_since(t0);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  res.kl = {kInf, kInf, kInf};
  res.eta = {1.0, 0.0, 0.0};
  res.weights = {1.0, 0.0, 0.0};
  res.peak = r.peak_value;
  const BBox box = finish_box(translate(box_, r));

  t0 = Clock::now();
  const FilterParams params{config_.lambda, config_.sigma_k, config_.alpha, std::nullopt, config_.literal_update};
  const Frame patch = resample_window(frame, box.cx, box.cy, box.w * window_kx_, box.h * window_ky_, grid_w_, grid_h_);
  FeatureMap x = hog(patch, config_.cell_size);
  apply_hann_window(x);
  const FilterModel fresh = train_filter(x, label_, params);
  models_[kHog] = update_model(models_[kHog], fresh.coeffs, fresh.templ, config_.alpha);
  res.timings.update = ms_since(t0);

  box_ = box;
  res.box = box;
  res.frame = ++t_;
  res.elapsed_ms = ms_since(t_start);
  return res;
}

}  // namespace brcf
