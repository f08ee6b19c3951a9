#include <atomic>
#include <stdexcept>

#include "nlflat/simd.hpp"

namespace nlflat::simd {

namespace {

Isa probe() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#elif defined(__aarch64__)
  return Isa::neon;
#endif
  return Isa::scalar;
}

// -1 = no override
std::atomic<int> g_override{-1};

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

Isa detected_isa() {
  static const Isa isa = probe();
  return isa;
}

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
  return isa == detected_isa();
}

Isa active_isa() {
  const int o = g_override.load(std::memory_order_relaxed);
  return o < 0 ? detected_isa() : static_cast<Isa>(o);
}

void set_isa_override(std::optional<Isa> isa) {
  if (isa && !isa_supported(*isa)) throw std::invalid_argument(std::string("isa not supported on this host: ") + isa_name(*isa));
  g_override.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return kernels::dot_avx2(a.data(), b.data(), a.size());
#endif
#if defined(__aarch64__)
    case Isa::neon: return kernels::dot_neon(a.data(), b.data(), a.size());
#endif
    default: return kernels::dot_scalar(a.data(), b.data(), a.size());
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: kernels::axpy_avx2(alpha, x.data(), y.data(), x.size()); return;
#endif
#if defined(__aarch64__)
    case Isa::neon: kernels::axpy_neon(alpha, x.data(), y.data(), x.size()); return;
#endif
    default: kernels::axpy_scalar(alpha, x.data(), y.data(), x.size()); return;
  }
}

}  // namespace nlflat::simd
