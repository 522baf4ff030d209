#pragma once

#include <optional>

#include "brcf/features.hpp"
#include "brcf/fft.hpp"

namespace brcf {

/// Regression targets over circular shifts; zero shift sits at (0, 0).
struct LabelMap {
  RealGrid values;
  double sigma = 0.0;
};

/// Real-valued detection output with its maximum.
struct ResponseMap {
  RealGrid values;
  int peak_row = 0;
  int peak_col = 0;
  double peak_value = 0.0;
  /// Largest imaginary part dropped by the inverse transform.
  double max_imag = 0.0;

  static ResponseMap from_grid(RealGrid grid);
};

/// Translation in cells (row, column).
struct CellShift {
  double dy = 0.0;
  double dx = 0.0;
};

/// Circular index -> signed offset; indices past n/2 become negative.
inline int wrap_offset(int index, int n) { return index > n / 2 ? index - n : index; }

struct FilterParams {
  double lambda = 1e-4;
  double sigma_k = 0.5;
  /// Learning rate for update_model.
  double alpha = 0.02;
  /// Local-region radius in cells; empty means the whole grid (no restriction).
  std::optional<int> p_cells;
  /// Use the additive c + alpha * c_t rule instead of the convex combination.
  bool literal_update = false;
};

/// One trained sub-model: coefficient spectrum, template spectrum and label spectrum.
struct FilterModel {
  Spectrum coeffs;
  MultiSpectrum templ;
  Spectrum label;
  FilterParams params;
  int frames = 0;

  bool empty() const { return frames == 0; }
};

LabelMap gaussian_label(int rows, int cols, double sigma);

/// Zeroes every entry whose circular shift lies outside [-p, p] on either axis.
/// Throws if 2p exceeds the smaller grid dimension.
RealGrid apply_local_region_mask(RealGrid map, int p_cells);
LabelMap apply_local_region_mask(LabelMap map, int p_cells);

MultiSpectrum feature_spectrum(const FeatureMap& map);
/// Squared L2 norm of the spatial map behind a spectrum (Parseval).
double spectrum_energy(const MultiSpectrum& spectrum);

/// Gaussian kernel correlation over all circular shifts, computed in the Fourier domain:
/// k(d) = exp(-|x - z(. + d)|^2 / (sigma^2 * rows * cols * channels)).
RealGrid gaussian_correlation(const MultiSpectrum& xf, const MultiSpectrum& zf, double sigma);
RealGrid kernel_correlation(const FeatureMap& x, const FeatureMap& z, double sigma);

/// Kernel ridge regression in the Fourier domain: c = y / (k^xx + lambda), with the
/// kernel and label restricted to the local region when params.p_cells is set.
FilterModel train_filter(const FeatureMap& x, const LabelMap& label, const FilterParams& params);

ResponseMap detect(const FilterModel& model, const FeatureMap& z);
/// Same as detect() for a precomputed spectrum of z.
ResponseMap detect(const FilterModel& model, const MultiSpectrum& zf);

/// Frame 1 (empty model) takes the new values; later frames blend them in with alpha.
FilterModel update_model(const FilterModel& model, const Spectrum& new_coeffs,
                         const MultiSpectrum& new_template, double alpha);

/// Peak translation in cells, refined by a parabola through the circular neighbours.
CellShift peak_shift(const ResponseMap& response, bool subcell = true);

}  // namespace brcf
