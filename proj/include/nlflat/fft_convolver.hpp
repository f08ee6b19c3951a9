#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlflat {

/// Linear (non-circular) convolution with a fixed symmetric Toeplitz stencil,
///   out[i] = sum_j g[|i - j|] u[j],  i, j = 0..n-1,
/// through an FFTW real transform of length M >= 2n - 1 with zero padding.
/// The stencil spectrum and plans are built once; convolve() is const and
/// allocates its own work buffers, so concurrent calls are safe.
class FftConvolver {
 public:
  explicit FftConvolver(std::span<const double> stencil);
  ~FftConvolver();
  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  std::size_t size() const { return n_; }
  std::size_t transform_size() const { return m_; }

  void convolve(std::span<const double> u, std::span<double> out) const;

 private:
  struct Plans;
  std::size_t n_;
  std::size_t m_;
  std::vector<double> spectrum_;  // interleaved (re, im), m/2 + 1 entries, pre-scaled by 1/m
  std::unique_ptr<Plans> plans_;
};

}  // namespace nlflat
