#pragma once

#include <span>
#include <string>
#include <vector>

namespace nlflat {

// Heat kernel p_s(t, x) of d/dt = -(-Laplacian)^s on the line,
//   p_s(t, x) = (1/pi) int_0^inf exp(-t xi^{2s}) cos(x xi) dxi,
// and the solutions it generates from step data. Independent of the
// grid solver; used to cross-validate it.

enum class HeatKernelMethod {
  closed_form,        // s = 1/2 (Cauchy) and s = 1 (Gaussian)
  fourier_inversion,  // oscillatory quadrature between cosine zeros, Wynn-accelerated
  series,             // large-|x| expansion in |x|^{-1-2sk}
};

const char* method_name(HeatKernelMethod m);

struct HeatKernelValue {
  double value = 0.0;
  double error = 0.0;
  HeatKernelMethod method = HeatKernelMethod::closed_form;
};

struct HeatKernelOptions {
  /// Skip closed forms and the series; always invert the Fourier transform.
  bool force_fourier = false;
  double rel_tol = 1e-12;
};

HeatKernelValue heat_kernel_value(double s, double t, double x, HeatKernelOptions options = {});

/// p_s(t, x) for s in (0, 1], t > 0.
double fractional_heat_kernel(double s, double t, double x);

/// Sampled kernel with per-point error estimates.
struct HeatKernelEval {
  double s = 0.5;
  double t = 1.0;
  std::vector<double> x;
  std::vector<double> p;
  std::vector<HeatKernelMethod> method;
  double error_estimate = 0.0;  // max over points
};

HeatKernelEval evaluate_heat_kernel(double s, double t, std::span<const double> xs, HeatKernelOptions options = {});

struct MassEstimate {
  double mass = 0.0;
  double error = 0.0;
};

/// int_R p_s(t, x) dx (should be 1).
MassEstimate heat_kernel_mass(double s, double t);

/// a int_{x-b}^inf p_s(t, y) dy: the solution from the step a 1_{(-inf, b]}.
double reference_solution(double s, double a, double b, double t, double x);

/// c_s in p_s(t, x) ~ c_s t |x|^{-1-2s} as |x| -> inf: Gamma(2s+1) sin(pi s) / pi.
double heat_kernel_tail_coefficient(double s);

struct HeatKernelBoundsFit {
  double C1 = 1.0;             // smallest C1 >= 1 making both bounds hold at the samples
  double min_ratio = 0.0;      // min of p t^{1/2s} (1 + |y|^{1+2s})
  double max_ratio = 0.0;
  double limit_measured = 0.0; // x^{2s} u(t, x) / t far out, u = reference solution with a = 1, b = 0
  double limit_bound = 0.0;    // a / C1, the constant of the lower-limit display
  double limit_bound_exact_integral = 0.0;  // a / (2 s C1), what integrating the lower bound gives
  std::size_t samples = 0;
};

HeatKernelBoundsFit heat_kernel_bounds_fit(double s, std::span<const double> t_samples,
                                           std::span<const double> x_samples);

}  // namespace nlflat
