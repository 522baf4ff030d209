#pragma once

#include <complex>
#include <span>
#include <vector>

namespace brcf {

using Complex = std::complex<double>;

/// Real rows x cols grid, row-major.
struct RealGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  RealGrid() = default;
  RealGrid(int rows, int cols, double fill = 0.0)
      : rows(rows), cols(cols), data(static_cast<std::size_t>(rows) * cols, fill) {}

  std::size_t size() const { return data.size(); }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  bool same_shape(const RealGrid& o) const { return rows == o.rows && cols == o.cols; }
};

/// Complex rows x cols grid (full, unpacked DFT layout).
struct Spectrum {
  int rows = 0;
  int cols = 0;
  std::vector<Complex> data;

  Spectrum() = default;
  Spectrum(int rows, int cols) : rows(rows), cols(cols), data(static_cast<std::size_t>(rows) * cols) {}

  std::size_t size() const { return data.size(); }
  bool same_shape(const Spectrum& o) const { return rows == o.rows && cols == o.cols; }
};

/// Per-channel spectra of a multi-channel map, stored plane by plane.
struct MultiSpectrum {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  std::vector<Complex> data;

  MultiSpectrum() = default;
  MultiSpectrum(int rows, int cols, int channels)
      : rows(rows), cols(cols), channels(channels),
        data(static_cast<std::size_t>(rows) * cols * channels) {}

  std::size_t plane_size() const { return static_cast<std::size_t>(rows) * cols; }
  std::span<Complex> plane(int k) { return {data.data() + k * plane_size(), plane_size()}; }
  std::span<const Complex> plane(int k) const { return {data.data() + k * plane_size(), plane_size()}; }
  bool same_shape(const MultiSpectrum& o) const {
    return rows == o.rows && cols == o.cols && channels == o.channels;
  }
};

// Forward transforms are unnormalised; inverse transforms divide by rows * cols.
void fft2_inplace(std::span<Complex> data, int rows, int cols, bool inverse);
Spectrum fft2(const RealGrid& grid);
Spectrum fft2(std::span<const double> data, int rows, int cols);
Spectrum ifft2(const Spectrum& spectrum);
/// Inverse transform keeping the real part; `max_imag` receives the largest discarded |imag|.
RealGrid ifft2_real(const Spectrum& spectrum, double* max_imag = nullptr);

}  // namespace brcf
