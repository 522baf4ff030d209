#include "brcf/bbox_regression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "brcf/features.hpp"

namespace brcf {

namespace {

constexpr const char* kRegressorHeader = "BRCF-REG-1";
constexpr int kDivergencePatience = 10;

void check_box(const BBox& b, const char* what) {
  if (!b.valid()) throw std::invalid_argument(std::string(what) + ": box needs finite, positive size");
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Largest eigenvalue of a symmetric positive semidefinite n x n matrix.
double largest_eigenvalue(const std::vector<double>& k, std::size_t n) {
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    for (std::size_t i = 0; i < n; ++i) next[i] = dot(&k[i * n], v.data(), n);
    const double norm = std::sqrt(dot(next.data(), next.data(), n));
    if (norm == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = next[i] / norm;
    if (std::abs(norm - lambda) <= 1e-12 * norm) {
      lambda = norm;
      break;
    }
    lambda = norm;
  }
  return lambda;
}

}  // namespace

BoxDeltas regression_targets(const BBox& sample, const BBox& truth) {
  check_box(sample, "regression_targets");
  check_box(truth, "regression_targets");
  return {(truth.cx - sample.cx) / sample.w, (truth.cy - sample.cy) / sample.h, std::log(truth.w / sample.w),
          std::log(truth.h / sample.h)};
}

BBox apply_targets(const BBox& sample, const BoxDeltas& t, bool literal) {
  const double sx = literal ? sample.cx : sample.w;
  const double sy = literal ? sample.cy : sample.h;
  return {sample.cx + t[0] * sx, sample.cy + t[1] * sy, sample.w * std::exp(t[2]), sample.h * std::exp(t[3])};
}

std::vector<BBox> sample_training_boxes(const BBox& truth, int n, std::uint64_t seed, const SamplingParams& params) {
  check_box(truth, "sample_training_boxes");
  if (n < 0) throw std::invalid_argument("sample_training_boxes: negative count");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shift(-params.center_jitter, params.center_jitter);
  std::uniform_real_distribution<double> log_scale(std::log(params.scale_lo), std::log(params.scale_hi));
  std::vector<BBox> out;
  out.reserve(n);
  int attempts = 0;
  while (static_cast<int>(out.size()) < n) {
    if (++attempts > params.max_attempts)
      throw std::runtime_error("sample_training_boxes: could not reach the IoU threshold");
    const BBox s{truth.cx + shift(rng) * truth.w, truth.cy + shift(rng) * truth.h, truth.w * std::exp(log_scale(rng)),
                 truth.h * std::exp(log_scale(rng))};
    if (iou(s, truth) >= params.iou_min) out.push_back(s);
  }
  return out;
}

std::size_t regression_feature_size(const RegressionFeatureParams& params) {
  const std::size_t cells = static_cast<std::size_t>(params.patch_size / params.cell_size);
  return cells * cells * kHogChannels;
}

std::vector<double> regression_features(const Frame& frame, const BBox& box, const RegressionFeatureParams& params) {
  check_box(box, "regression_features");
  const double grow = 1.0 + 2.0 * params.context;
  const Frame patch = resample_window(frame, box.cx, box.cy, box.w * grow, box.h * grow, params.patch_size,
                                      params.patch_size);
  return hog(patch, params.cell_size).values;
}

TrainingPair make_training_pair(const Frame& frame, const BBox& sample, const BBox& truth,
                                const RegressionFeatureParams& params) {
  return {sample, truth, regression_features(frame, sample, params), regression_targets(sample, truth)};
}

double ridge_loss(const std::vector<double>& features, const std::vector<double>& targets, const std::vector<double>& w,
                  double lambda) {
  const std::size_t d = w.size();
  double loss = lambda * dot(w.data(), w.data(), d);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double r = targets[i] - dot(&features[i * d], w.data(), d);
    loss += r * r;
  }
  return loss;
}

std::vector<double> ridge_gradient(const std::vector<double>& features, const std::vector<double>& targets,
                                   const std::vector<double>& w, double lambda) {
  const std::size_t d = w.size();
  std::vector<double> g(d);
  for (std::size_t j = 0; j < d; ++j) g[j] = 2.0 * lambda * w[j];
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double* f = &features[i * d];
    const double r = dot(f, w.data(), d) - targets[i];
    for (std::size_t j = 0; j < d; ++j) g[j] += 2.0 * r * f[j];
  }
  return g;
}

RegressorWeights train_regressor(const std::vector<TrainingPair>& pairs, const BgdParams& params,
                                 const RegressorWeights* warm_start, std::vector<double>* loss_trace) {
  if (pairs.empty()) throw std::invalid_argument("train_regressor: no training pairs");
  if (!(params.lambda >= 0.0)) throw std::invalid_argument("train_regressor: lambda must be >= 0");
  if (params.iters < 0) throw std::invalid_argument("train_regressor: negative iteration count");
  const std::size_t n = pairs.size();
  const std::size_t d = pairs.front().feature.size();
  for (const auto& p : pairs) {
    if (p.feature.size() != d) throw std::invalid_argument("train_regressor: feature length mismatch");
  }
  const bool warm = warm_start != nullptr && !warm_start->empty();
  if (warm && warm_start->dim() != d) throw std::invalid_argument("train_regressor: warm start has another dimension");

  RegressorWeights out;
  out.lambda = params.lambda;
  if (warm) {
    out.mean = warm_start->mean;
    out.stddev = warm_start->stddev;
    out.features = warm_start->features;
  } else {
    out.mean.assign(d, 0.0);
    out.stddev.assign(d, 0.0);
    for (const auto& p : pairs) {
      for (std::size_t j = 0; j < d; ++j) out.mean[j] += p.feature[j];
    }
    for (auto& m : out.mean) m /= static_cast<double>(n);
    for (const auto& p : pairs) {
      for (std::size_t j = 0; j < d; ++j) {
        const double c = p.feature[j] - out.mean[j];
        out.stddev[j] += c * c;
      }
    }
    for (auto& s : out.stddev) {
      s = std::sqrt(s / static_cast<double>(n));
      if (s < 1e-8) s = 1.0;
    }
  }

  std::vector<double> f(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) f[i * d + j] = (pairs[i].feature[j] - out.mean[j]) / out.stddev[j];
  }
  // Gradient steps never leave span{w0, rows of F}, so iterate on w = c w0 + F^T a
  // using only the n x n Gram matrix.
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) k[i * n + j] = k[j * n + i] = dot(&f[i * d], &f[j * d], d);
  }
  const double lr = params.lr > 0.0 ? params.lr : 1.0 / (2.0 * (largest_eigenvalue(k, n) + params.lambda));
  const double shrink = 1.0 - 2.0 * lr * params.lambda;
  if (loss_trace) loss_trace->assign(params.iters, 0.0);

  for (int q = 0; q < 4; ++q) {
    std::vector<double> w0 = warm ? warm_start->w[q] : std::vector<double>(d, 0.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = pairs[i].targets[q];
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = dot(&f[i * d], w0.data(), d);
    const double w0_sq = dot(w0.data(), w0.data(), d);

    double c = 1.0;
    std::vector<double> a(n, 0.0), ka(n), g(n);
    double prev_loss = std::numeric_limits<double>::infinity();
    double first_loss = 0.0;
    int rising = 0;
    for (int it = 0; it < params.iters; ++it) {
      for (std::size_t i = 0; i < n; ++i) ka[i] = dot(&k[i * n], a.data(), n);
      for (std::size_t i = 0; i < n; ++i) g[i] = c * u[i] + ka[i] - t[i];
      const double loss = dot(g.data(), g.data(), n) +
                          params.lambda * (c * c * w0_sq + 2.0 * c * dot(a.data(), u.data(), n) + dot(a.data(), ka.data(), n));
      if (loss_trace) (*loss_trace)[it] += loss;
      if (!std::isfinite(loss)) throw std::runtime_error("train_regressor: loss diverged; use a smaller learning rate");
      if (it == 0) first_loss = loss;
      // Rounding noise near a zero-loss optimum is not divergence.
      rising = loss - prev_loss > 1e-12 * first_loss ? rising + 1 : 0;
      if (rising >= kDivergencePatience)
        throw std::runtime_error("train_regressor: loss increased for 10 iterations; use a smaller learning rate");
      prev_loss = loss;
      for (std::size_t i = 0; i < n; ++i) a[i] = shrink * a[i] - 2.0 * lr * g[i];
      c *= shrink;
    }
    auto& w = out.w[q];
    w.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) w[j] = c * w0[j];
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] == 0.0) continue;
      const double* fi = &f[i * d];
      for (std::size_t j = 0; j < d; ++j) w[j] += a[i] * fi[j];
    }
  }
  return out;
}

BoxDeltas predict_deltas(const RegressorWeights& weights, const std::vector<double>& feature) {
  if (feature.size() != weights.dim()) throw std::invalid_argument("apply_regressor: feature length mismatch");
  const std::size_t d = feature.size();
  std::vector<double> z(d);
  for (std::size_t j = 0; j < d; ++j) z[j] = (feature[j] - weights.mean[j]) / weights.stddev[j];
  BoxDeltas s{};
  for (int q = 0; q < 4; ++q) s[q] = dot(weights.w[q].data(), z.data(), d);
  s[2] = std::clamp(s[2], -kLogScaleClamp, kLogScaleClamp);
  s[3] = std::clamp(s[3], -kLogScaleClamp, kLogScaleClamp);
  return s;
}

BBox apply_regressor(const RegressorWeights& weights, const std::vector<double>& feature, const BBox& box, bool literal,
                     BoxDeltas* deltas) {
  check_box(box, "apply_regressor");
  const BoxDeltas s = predict_deltas(weights, feature);
  if (deltas) *deltas = s;
  return apply_targets(box, s, literal);
}

void save_regressor(const std::filesystem::path& path, const RegressorWeights& weights) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_regressor: cannot open " + path.string());
  os << kRegressorHeader << '\n';
  os << weights.dim() << ' ' << weights.features.patch_size << ' ' << weights.features.cell_size << ' '
     << std::setprecision(17) << weights.features.context << ' ' << weights.lambda << '\n';
  auto write_row = [&os](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    os << '\n';
  };
  write_row(weights.mean);
  write_row(weights.stddev);
  for (const auto& w : weights.w) write_row(w);
  if (!os) throw std::runtime_error("save_regressor: write failed for " + path.string());
}

RegressorWeights load_regressor(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_regressor: cannot open " + path.string());
  std::string header;
  std::getline(is, header);
  if (header != kRegressorHeader) throw std::runtime_error("load_regressor: not a regressor file: " + path.string());
  RegressorWeights out;
  std::size_t d = 0;
  if (!(is >> d >> out.features.patch_size >> out.features.cell_size >> out.features.context >> out.lambda))
    throw std::runtime_error("load_regressor: bad header line");
  if (d != regression_feature_size(out.features))
    throw std::runtime_error("load_regressor: dimension does not match the patch parameters");
  auto read_row = [&is, d](std::vector<double>& v) {
    v.resize(d);
    for (auto& x : v) {
      if (!(is >> x)) throw std::runtime_error("load_regressor: truncated file");
    }
  };
  read_row(out.mean);
  read_row(out.stddev);
  for (auto& w : out.w) read_row(w);
  for (double s : out.stddev) {
    if (!(s > 0.0)) throw std::runtime_error("load_regressor: non-positive standard deviation");
  }
  return out;
}

}  // namespace brcf
