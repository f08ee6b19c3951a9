#pragma once

// Data-parallel inner loops of the direct operator and the Euler update.
// Each kernel has a portable scalar reference and vectorized variants; the
// variant is chosen once at runtime from the host CPU (overridable for tests
// and benchmarks).

#include <cstddef>
#include <optional>
#include <span>

namespace nlflat::simd {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);

/// Best instruction set this binary was built with and the host supports.
Isa detected_isa();

/// Instruction set used by the dispatched entry points below.
Isa active_isa();

/// Pins dispatch to `isa` (must be supported) or restores detection with nullopt.
void set_isa_override(std::optional<Isa> isa);

bool isa_supported(Isa isa);

/// sum_i a[i] * b[i]
double dot(std::span<const double> a, std::span<const double> b);

/// y[i] += alpha * x[i]
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace kernels {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
#endif

#if defined(__aarch64__)
double dot_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
#endif

}  // namespace kernels

}  // namespace nlflat::simd
