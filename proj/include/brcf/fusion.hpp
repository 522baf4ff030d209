#pragma once

#include <array>

#include "brcf/cf_core.hpp"

namespace brcf {

/// Nonnegative grid summing to one.
struct ProbMap {
  RealGrid p;
};

/// Sub-model order used by every triple in this module.
enum class SubModel : int { Hog = 0, Color = 1, Lbp = 2 };

using Triple = std::array<double, 3>;

/// Fusion weights for frame `frame`; frame 0 means no weights have been set yet.
struct FusionWeights {
  Triple alpha{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double lambda_w = 0.025;
  int frame = 0;
};

inline constexpr double kResponseEpsilon = 1e-8;
inline constexpr double kKlFloor = 1e-6;

/// Min-shift, add epsilon, divide by the total.
ProbMap normalize_response(const ResponseMap& response);

/// Circular Gaussian centred on `peak_row, peak_col`, normalised to sum 1.
ProbMap ideal_response(int peak_row, int peak_col, int rows, int cols, double sigma);

/// KL(R || R_pred) with the natural log.
double kl_divergence(const ProbMap& ideal, const ProbMap& predicted);

/// Per-frame weights proportional to 1 / KL; each KL is floored at kKlFloor first.
Triple compute_frame_weights(double kl_hog, double kl_ch, double kl_lh);

/// Exponential smoothing of the fusion weights. Frame 1 takes eta directly.
FusionWeights update_weights(const FusionWeights& w, const Triple& eta, double lambda_w);

/// Alpha-weighted sum of the three responses.
ResponseMap fuse_responses(const ResponseMap& r_hog, const ResponseMap& r_ch, const ResponseMap& r_lh,
                           const FusionWeights& w);

/// KL of one response against the ideal Gaussian placed at its own peak.
double response_reliability(const ResponseMap& response, double sigma);

}  // namespace brcf
