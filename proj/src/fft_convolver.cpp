#include "nlflat/fft_convolver.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace nlflat {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t good_size(std::size_t min) {
  std::size_t m = 1;
  while (m < min) m <<= 1;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

}  // namespace

struct FftConvolver::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

FftConvolver::FftConvolver(std::span<const double> stencil)
    : n_(stencil.size()), m_(good_size(2 * stencil.size())), plans_(std::make_unique<Plans>()) {
  if (n_ == 0) throw std::invalid_argument("FftConvolver: empty stencil");
  const std::size_t nc = m_ / 2 + 1;
  auto real = alloc_real(m_);
  auto cplx = alloc_complex(nc);
  {
    std::lock_guard lock(planner_mutex());
    const int m = static_cast<int>(m_);
    plans_->forward = fftw_plan_dft_r2c_1d(m, real.get(), cplx.get(), FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_1d(m, cplx.get(), real.get(), FFTW_ESTIMATE);
  }
  if (!plans_->forward || !plans_->backward) throw std::runtime_error("FftConvolver: FFTW planning failed");

  // Circulant embedding of the symmetric Toeplitz stencil.
  for (std::size_t i = 0; i < m_; ++i) real[i] = 0.0;
  real[0] = stencil[0];
  for (std::size_t k = 1; k < n_; ++k) {
    real[k] = stencil[k];
    real[m_ - k] = stencil[k];
  }
  fftw_execute_dft_r2c(plans_->forward, real.get(), cplx.get());
  spectrum_.resize(2 * nc);
  const double scale = 1.0 / static_cast<double>(m_);
  for (std::size_t k = 0; k < nc; ++k) {
    spectrum_[2 * k] = cplx[k][0] * scale;
    spectrum_[2 * k + 1] = cplx[k][1] * scale;
  }
}

FftConvolver::~FftConvolver() = default;

void FftConvolver::convolve(std::span<const double> u, std::span<double> out) const {
  if (u.size() != n_ || out.size() != n_) throw std::invalid_argument("FftConvolver: size mismatch");
  const std::size_t nc = m_ / 2 + 1;
  auto real = alloc_real(m_);
  auto cplx = alloc_complex(nc);
  for (std::size_t i = 0; i < n_; ++i) real[i] = u[i];
  for (std::size_t i = n_; i < m_; ++i) real[i] = 0.0;
  fftw_execute_dft_r2c(plans_->forward, real.get(), cplx.get());
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = cplx[k][0], im = cplx[k][1];
    const double kr = spectrum_[2 * k], ki = spectrum_[2 * k + 1];
    cplx[k][0] = re * kr - im * ki;
    cplx[k][1] = re * ki + im * kr;
  }
  fftw_execute_dft_c2r(plans_->backward, cplx.get(), real.get());
  for (std::size_t i = 0; i < n_; ++i) out[i] = real[i];
}

}  // namespace nlflat
