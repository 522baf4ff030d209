#include "brcf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace brcf {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int rows, int cols, bool inverse) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(rows, cols, inverse);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> scratch(static_cast<std::size_t>(rows) * cols);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(rows, cols, buf, buf, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fft: plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, bool>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void fft2_inplace(std::span<Complex> data, int rows, int cols, bool inverse) {
  if (rows <= 0 || cols <= 0 || data.size() != static_cast<std::size_t>(rows) * cols)
    throw std::invalid_argument("fft2: buffer does not match grid dimensions");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_cache().get(rows, cols, inverse), buf, buf);
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v *= scale;
  }
}

Spectrum fft2(std::span<const double> data, int rows, int cols) {
  Spectrum s(rows, cols);
  if (data.size() != s.size()) throw std::invalid_argument("fft2: buffer does not match grid dimensions");
  for (std::size_t i = 0; i < data.size(); ++i) s.data[i] = Complex(data[i], 0.0);
  fft2_inplace(s.data, rows, cols, false);
  return s;
}

Spectrum fft2(const RealGrid& grid) { return fft2(grid.data, grid.rows, grid.cols); }

Spectrum ifft2(const Spectrum& spectrum) {
  Spectrum out = spectrum;
  fft2_inplace(out.data, out.rows, out.cols, true);
  return out;
}

RealGrid ifft2_real(const Spectrum& spectrum, double* max_imag) {
  const Spectrum complex_out = ifft2(spectrum);
  RealGrid out(spectrum.rows, spectrum.cols);
  double worst = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data[i] = complex_out.data[i].real();
    worst = std::max(worst, std::abs(complex_out.data[i].imag()));
  }
  if (max_imag) *max_imag = worst;
  return out;
}

}  // namespace brcf
