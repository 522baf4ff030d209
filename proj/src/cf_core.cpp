#include "brcf/cf_core.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace brcf {

ResponseMap ResponseMap::from_grid(RealGrid grid) {
  ResponseMap r;
  r.values = std::move(grid);
  if (r.values.size() == 0) return r;
  const auto it = std::max_element(r.values.data.begin(), r.values.data.end());
  const auto idx = static_cast<int>(it - r.values.data.begin());
  r.peak_row = idx / r.values.cols;
  r.peak_col = idx % r.values.cols;
  r.peak_value = *it;
  return r;
}

LabelMap gaussian_label(int rows, int cols, double sigma) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("gaussian_label: empty grid");
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_label: sigma must be positive");
  LabelMap label{RealGrid(rows, cols), sigma};
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int r = 0; r < rows; ++r) {
    const int dy = std::min(r, rows - r);
    for (int c = 0; c < cols; ++c) {
      const int dx = std::min(c, cols - c);
      label.values.at(r, c) = std::exp(-(dx * dx + dy * dy) * inv);
    }
  }
  return label;
}

RealGrid apply_local_region_mask(RealGrid map, int p_cells) {
  if (p_cells < 0) throw std::invalid_argument("apply_local_region_mask: negative radius");
  if (2 * p_cells > std::min(map.rows, map.cols))
    throw std::invalid_argument("apply_local_region_mask: local window larger than the map");
  for (int r = 0; r < map.rows; ++r) {
    const bool row_in = std::abs(wrap_offset(r, map.rows)) <= p_cells;
    for (int c = 0; c < map.cols; ++c) {
      if (!row_in || std::abs(wrap_offset(c, map.cols)) > p_cells) map.at(r, c) = 0.0;
    }
  }
  return map;
}

LabelMap apply_local_region_mask(LabelMap map, int p_cells) {
  map.values = apply_local_region_mask(std::move(map.values), p_cells);
  return map;
}

MultiSpectrum feature_spectrum(const FeatureMap& map) {
  MultiSpectrum out(map.rows, map.cols, map.channels);
  for (int k = 0; k < map.channels; ++k) {
    auto dst = out.plane(k);
    const auto src = map.plane(k);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = Complex(src[i], 0.0);
    fft2_inplace(dst, map.rows, map.cols, false);
  }
  return out;
}

double spectrum_energy(const MultiSpectrum& spectrum) {
  double sum = 0.0;
  for (const auto& v : spectrum.data) sum += std::norm(v);
  return sum / static_cast<double>(spectrum.plane_size());
}

RealGrid gaussian_correlation(const MultiSpectrum& xf, const MultiSpectrum& zf, double sigma) {
  if (!xf.same_shape(zf)) throw std::invalid_argument("kernel_correlation: dimension mismatch");
  if (!(sigma > 0.0)) throw std::invalid_argument("kernel_correlation: sigma must be positive");
  const std::size_t n = xf.plane_size();
  Spectrum acc(xf.rows, xf.cols);
  for (int k = 0; k < xf.channels; ++k) {
    const auto xp = xf.plane(k);
    const auto zp = zf.plane(k);
    for (std::size_t i = 0; i < n; ++i) acc.data[i] += std::conj(xp[i]) * zp[i];
  }
  RealGrid cross = ifft2_real(acc);
  const double xx = spectrum_energy(xf);
  const double zz = spectrum_energy(zf);
  const double denom = sigma * sigma * static_cast<double>(n) * xf.channels;
  for (auto& v : cross.data) v = std::exp(-std::max(0.0, xx + zz - 2.0 * v) / denom);
  return cross;
}

RealGrid kernel_correlation(const FeatureMap& x, const FeatureMap& z, double sigma) {
  if (!x.same_shape(z)) throw std::invalid_argument("kernel_correlation: dimension mismatch");
  return gaussian_correlation(feature_spectrum(x), feature_spectrum(z), sigma);
}

namespace {

void check_params(const FilterParams& p) {
  if (!(p.lambda > 0.0)) throw std::invalid_argument("filter: lambda must be positive");
  if (!(p.sigma_k > 0.0)) throw std::invalid_argument("filter: sigma_k must be positive");
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw std::invalid_argument("filter: alpha must lie in [0, 1]");
  if (p.p_cells && *p.p_cells < 1) throw std::invalid_argument("filter: local radius must be >= 1 cell");
}

}  // namespace

FilterModel train_filter(const FeatureMap& x, const LabelMap& label, const FilterParams& params) {
  check_params(params);
  if (label.values.rows != x.rows || label.values.cols != x.cols)
    throw std::invalid_argument("train_filter: label grid does not match the features");

  FilterModel model;
  model.params = params;
  model.templ = feature_spectrum(x);
  RealGrid kxx = gaussian_correlation(model.templ, model.templ, params.sigma_k);
  RealGrid y = label.values;
  if (params.p_cells) {
    kxx = apply_local_region_mask(std::move(kxx), *params.p_cells);
    y = apply_local_region_mask(std::move(y), *params.p_cells);
  }
  const Spectrum kf = fft2(kxx);
  model.label = fft2(y);
  model.coeffs = Spectrum(x.rows, x.cols);
  for (std::size_t i = 0; i < kf.size(); ++i) {
    // The truncated kernel map can lose positive definiteness; negative real parts of its
    // spectrum are projected to zero so the denominator keeps magnitude >= lambda.
    const Complex denom(std::max(kf.data[i].real(), 0.0) + params.lambda, kf.data[i].imag());
    assert(std::abs(denom) >= params.lambda * (1.0 - 1e-12));
    model.coeffs.data[i] = model.label.data[i] / denom;
  }
  model.frames = 1;
  return model;
}

ResponseMap detect(const FilterModel& model, const MultiSpectrum& zf) {
  if (!model.templ.same_shape(zf)) throw std::invalid_argument("detect: feature grid does not match the model");
  const RealGrid kxz = gaussian_correlation(model.templ, zf, model.params.sigma_k);
  Spectrum resp = fft2(kxz);
  for (std::size_t i = 0; i < resp.size(); ++i) resp.data[i] *= model.coeffs.data[i];
  double max_imag = 0.0;
  RealGrid spatial = ifft2_real(resp, &max_imag);
  ResponseMap out = ResponseMap::from_grid(std::move(spatial));
  out.max_imag = max_imag;
  return out;
}

ResponseMap detect(const FilterModel& model, const FeatureMap& z) {
  if (z.rows != model.templ.rows || z.cols != model.templ.cols || z.channels != model.templ.channels)
    throw std::invalid_argument("detect: feature grid does not match the model");
  return detect(model, feature_spectrum(z));
}

FilterModel update_model(const FilterModel& model, const Spectrum& new_coeffs,
                         const MultiSpectrum& new_template, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("update_model: alpha must lie in [0, 1]");
  FilterModel out = model;
  if (model.empty()) {
    out.coeffs = new_coeffs;
    out.templ = new_template;
    out.frames = 1;
    return out;
  }
  if (!model.coeffs.same_shape(new_coeffs) || !model.templ.same_shape(new_template))
    throw std::invalid_argument("update_model: dimension mismatch");
  const double keep = 1.0 - alpha;
  if (model.params.literal_update) {
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs.data[i] += alpha * new_coeffs.data[i];
  } else {
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
      out.coeffs.data[i] = keep * model.coeffs.data[i] + alpha * new_coeffs.data[i];
  }
  for (std::size_t i = 0; i < out.templ.data.size(); ++i)
    out.templ.data[i] = keep * model.templ.data[i] + alpha * new_template.data[i];
  ++out.frames;
  return out;
}

CellShift peak_shift(const ResponseMap& response, bool subcell) {
  const RealGrid& g = response.values;
  CellShift shift{static_cast<double>(wrap_offset(response.peak_row, g.rows)),
                  static_cast<double>(wrap_offset(response.peak_col, g.cols))};
  if (!subcell) return shift;
  auto refine = [](double left, double center, double right) {
    const double d = left - 2.0 * center + right;
    if (d >= 0.0) return 0.0;
    return std::clamp(0.5 * (left - right) / d, -0.5, 0.5);
  };
  if (g.cols >= 3) {
    const int c = response.peak_col;
    shift.dx += refine(g.at(response.peak_row, (c + g.cols - 1) % g.cols), response.peak_value,
                       g.at(response.peak_row, (c + 1) % g.cols));
  }
  if (g.rows >= 3) {
    const int r = response.peak_row;
    shift.dy += refine(g.at((r + g.rows - 1) % g.rows, response.peak_col), response.peak_value,
                       g.at((r + 1) % g.rows, response.peak_col));
  }
  return shift;
}

}  // namespace brcf
