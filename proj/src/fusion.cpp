#include "brcf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace brcf {

ProbMap normalize_response(const ResponseMap& response) {
  const auto& src = response.values.data;
  if (src.empty()) throw std::invalid_argument("normalize_response: empty map");
  const double lo = *std::min_element(src.begin(), src.end());
  ProbMap out{RealGrid(response.values.rows, response.values.cols)};
  double total = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    out.p.data[i] = src[i] - lo + kResponseEpsilon;
    total += out.p.data[i];
  }
  for (auto& v : out.p.data) v /= total;
  return out;
}

ProbMap ideal_response(int peak_row, int peak_col, int rows, int cols, double sigma) {
  if (peak_row < 0 || peak_row >= rows || peak_col < 0 || peak_col >= cols)
    throw std::invalid_argument("ideal_response: peak outside the grid");
  if (!(sigma > 0.0)) throw std::invalid_argument("ideal_response: sigma must be positive");
  ProbMap out{RealGrid(rows, cols)};
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double total = 0.0;
  for (int r = 0; r < rows; ++r) {
    const int d = std::abs(r - peak_row);
    const int dy = std::min(d, rows - d);
    for (int c = 0; c < cols; ++c) {
      const int e = std::abs(c - peak_col);
      const int dx = std::min(e, cols - e);
      // Epsilon keeps every entry strictly positive like the predicted maps.
      const double v = std::exp(-(dx * dx + dy * dy) * inv) + kResponseEpsilon;
      out.p.at(r, c) = v;
      total += v;
    }
  }
  for (auto& v : out.p.data) v /= total;
  return out;
}

double kl_divergence(const ProbMap& ideal, const ProbMap& predicted) {
  if (!ideal.p.same_shape(predicted.p)) throw std::invalid_argument("kl_divergence: dimension mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < ideal.p.size(); ++i) {
    const double r = ideal.p.data[i];
    if (r > 0.0) kl += r * std::log(r / predicted.p.data[i]);
  }
  return std::max(kl, 0.0);
}

Triple compute_frame_weights(double kl_hog, double kl_ch, double kl_lh) {
  const Triple inv{1.0 / std::max(kl_hog, kKlFloor), 1.0 / std::max(kl_ch, kKlFloor),
                   1.0 / std::max(kl_lh, kKlFloor)};
  const double s = inv[0] + inv[1] + inv[2];
  Triple eta{inv[0] / s, inv[1] / s, inv[2] / s};
  // Absorb rounding in the largest weight so the triple sums to one exactly.
  const auto big = std::max_element(eta.begin(), eta.end()) - eta.begin();
  double rest = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (i != big) rest += eta[i];
  }
  eta[big] = 1.0 - rest;
  return eta;
}

FusionWeights update_weights(const FusionWeights& w, const Triple& eta, double lambda_w) {
  if (!(lambda_w >= 0.0 && lambda_w <= 1.0)) throw std::invalid_argument("update_weights: lambda_w must lie in [0, 1]");
  FusionWeights out = w;
  out.lambda_w = lambda_w;
  if (w.frame < 1) {
    out.alpha = eta;
    out.frame = 1;
    return out;
  }
  for (int i = 0; i < 3; ++i) out.alpha[i] = (1.0 - lambda_w) * w.alpha[i] + lambda_w * eta[i];
  ++out.frame;
  return out;
}

ResponseMap fuse_responses(const ResponseMap& r_hog, const ResponseMap& r_ch, const ResponseMap& r_lh,
                           const FusionWeights& w) {
  if (!r_hog.values.same_shape(r_ch.values) || !r_hog.values.same_shape(r_lh.values))
    throw std::invalid_argument("fuse_responses: dimension mismatch");
  RealGrid fused(r_hog.values.rows, r_hog.values.cols);
  for (std::size_t i = 0; i < fused.size(); ++i) {
    fused.data[i] = w.alpha[0] * r_hog.values.data[i] + w.alpha[1] * r_ch.values.data[i] +
                    w.alpha[2] * r_lh.values.data[i];
  }
  return ResponseMap::from_grid(std::move(fused));
}

double response_reliability(const ResponseMap& response, double sigma) {
  const ProbMap pred = normalize_response(response);
  const ProbMap ideal = ideal_response(response.peak_row, response.peak_col, response.values.rows,
                                       response.values.cols, sigma);
  return kl_divergence(ideal, pred);
}

}  // namespace brcf
