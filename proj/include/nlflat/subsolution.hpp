#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "nlflat/kernel.hpp"

namespace nlflat {

/// Constants of the explicit barrier
///   w(t, x) = 1/2                          for x <= 0,
///   w(t, x) = kappa t / (x^{2s} + 2 kappa t)  for x > 0,
/// with kappa = 1/(8 s J0), t_star = 2C/kappa and R_C = (8 C J0^2)^{1/(2s)}.
struct SubsolutionParams {
  double s = 0.5;
  double J0 = 1.0;
  double kappa = 0.25;
  double C = 1.0;
  double t_star = 8.0;
  double R_C = 8.0;
  double a = 1.0;
  double b = 0.0;
  double R0 = 2.0;

  /// Left end of the region where the barrier inequality is claimed: R0 + R_C.
  double region_start() const { return R0 + R_C; }
};

double kappa(const KernelSpec& spec);

struct ScalingConstants {
  double t_star;
  double R_C;
};

ScalingConstants scaling_constants(const KernelSpec& spec, double C);

/// Builds the full parameter bundle from a kernel, the scaling constant C and
/// the initial-datum plateau (a, b).
SubsolutionParams make_subsolution_params(const KernelSpec& spec, double C, double a = 1.0, double b = 0.0);

double w_eval(const SubsolutionParams& p, double t, double x);

/// Analytic time derivative of w.
double w_time_derivative(const SubsolutionParams& p, double t, double x);

/// Continuum D[w](t, x) by adaptive quadrature of the symmetrized integrand
/// [w(x+z) + w(x-z) - 2w(x)] J(z) over z > 0, split at the near cell, R_C and x.
double apply_continuum(const KernelSpec& spec, const SubsolutionParams& p, double t, double x, double quad_tol);

/// dw/dt - D[w] at (t, x). On (0, t_star) x [R0 + R_C, inf) this is <= 0 up to
/// the quadrature budget.
double subsolution_residual(const KernelSpec& spec, const SubsolutionParams& p, double t, double x, double quad_tol);

/// max(10 quad_tol |D[w]|, 1e-10)
double residual_budget(double apply_value, double quad_tol);

/// a w(t, x + R0 + R_C + b): the lower barrier placed against the solution.
double shifted_subsolution(const SubsolutionParams& p, double t, double x);

struct ResidualSample {
  double t;
  double x;
  double residual;
  double budget;
  bool pass;
};

/// Residual on a t_count x x_count tensor grid of (0, t_star) x [x_lo, x_hi].
/// Times are interior points t_star (j + 1)/(t_count + 1); x is uniform with both ends included.
std::vector<ResidualSample> residual_grid(const KernelSpec& spec, const SubsolutionParams& p, std::size_t t_count,
                                          std::size_t x_count, double x_lo, double x_hi, double quad_tol);

/// w(t, x+z) + w(t, x-z) - 2 w(t, x) >= 0 at sampled x >= R0 + R_C, |z| <= R_C.
/// Returns the smallest sampled increment.
double convexity_margin(const SubsolutionParams& p, double t, double x_hi, std::size_t samples);

nlohmann::json to_json(const ResidualSample& r);

}  // namespace nlflat
