#include "nlflat/subsolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlflat/errors.hpp"
#include "nlflat/quadrature.hpp"

namespace nlflat {

double kappa(const KernelSpec& spec) { return 1.0 / (8.0 * spec.s() * spec.declared().J0); }

ScalingConstants scaling_constants(const KernelSpec& spec, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("scaling_constants: C must be positive");
  const double j0 = spec.declared().J0;
  return {2.0 * C / kappa(spec), std::pow(8.0 * C * j0 * j0, 1.0 / (2.0 * spec.s()))};
}

SubsolutionParams make_subsolution_params(const KernelSpec& spec, double C, double a, double b) {
  if (!(a > 0.0)) throw std::invalid_argument("subsolution: plateau height a must be positive");
  const auto sc = scaling_constants(spec, C);
  SubsolutionParams p;
  p.s = spec.s();
  p.J0 = spec.declared().J0;
  p.kappa = kappa(spec);
  p.C = C;
  p.t_star = sc.t_star;
  p.R_C = sc.R_C;
  p.a = a;
  p.b = b;
  p.R0 = spec.declared().R0;
  return p;
}

double w_eval(const SubsolutionParams& p, double t, double x) {
  if (!(t > 0.0)) throw DomainError("w_eval: t must be positive");
  if (x <= 0.0) return 0.5;
  const double kt = p.kappa * t;
  return kt / (std::pow(x, 2.0 * p.s) + 2.0 * kt);
}

double w_time_derivative(const SubsolutionParams& p, double t, double x) {
  if (!(t > 0.0)) throw DomainError("w_time_derivative: t must be positive");
  if (x <= 0.0) return 0.0;
  const double xs = std::pow(x, 2.0 * p.s);
  const double den = xs + 2.0 * p.kappa * t;
  return p.kappa * xs / (den * den);
}

namespace {

/// w(y) - w(x) for 0 < x, y, free of cancellation when y is close to x.
double w_difference(const SubsolutionParams& p, double t, double x, double y) {
  const double kt = p.kappa * t;
  const double xs = std::pow(x, 2.0 * p.s);
  // x^{2s} - y^{2s} = -x^{2s} expm1(2s log(y/x))
  const double gap = -xs * std::expm1(2.0 * p.s * std::log1p((y - x) / x));
  return kt * gap / ((std::pow(y, 2.0 * p.s) + 2.0 * kt) * (xs + 2.0 * kt));
}

double w_second_derivative(const SubsolutionParams& p, double t, double x) {
  const double kt = p.kappa * t;
  const double two_s = 2.0 * p.s;
  const double d = std::pow(x, two_s) + 2.0 * kt;
  const double d1 = two_s * std::pow(x, two_s - 1.0);
  const double d2 = two_s * (two_s - 1.0) * std::pow(x, two_s - 2.0);
  return kt * (2.0 * d1 * d1 / (d * d * d) - d2 / (d * d));
}

// Below this fraction of x the symmetric difference is replaced by w''(x) z^2.
constexpr double kTaylorFraction = 1e-4;

}  // namespace

double apply_continuum(const KernelSpec& spec, const SubsolutionParams& p, double t, double x, double quad_tol) {
  if (!(quad_tol > 0.0)) throw std::invalid_argument("apply_continuum: quad_tol must be positive");
  const double wx = w_eval(p, t, x);
  auto symmetric = [&](double z) {
    if (z == 0.0) return 0.0;
    double diff;
    if (x > 0.0 && z < x) {
      diff = w_difference(p, t, x, x + z) + w_difference(p, t, x, x - z);
    } else {
      diff = w_eval(p, t, x + z) + w_eval(p, t, x - z) - 2.0 * wx;
    }
    return diff * eval_kernel(spec, z);
  };

  // Cut points: inner cell, the barrier radius, the kinks of w(x +- z) at the
  // junction, and the kernel's own breakpoints.
  const double ax = std::abs(x);
  std::vector<double> cuts{std::min(1.0, ax > 0.0 ? 0.5 * ax : 1.0), p.R_C};
  if (ax > 0.0) cuts.push_back(ax);
  for (double bp : spec.breakpoints()) cuts.push_back(bp);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [](double c) { return !(c > 0.0); }), cuts.end());

  // Beyond z_far both x - z <= 0 (w = 1/2) and all breakpoints are passed.
  const double z_far = std::max(cuts.back(), ax) * 2.0 + 1.0;
  cuts.push_back(z_far);

  double total = 0.0;
  double lo = 0.0;
  if (x > 0.0) {
    lo = std::min(kTaylorFraction * x, 0.5 * cuts.front());
    total += 0.5 * w_second_derivative(p, t, x) * near_moment(spec, lo);
  }
  for (double c : cuts) {
    total += quad::integrate(symmetric, lo, c, quad_tol).value;
    lo = c;
  }
  // On [z_far, inf): w(x - z) = 1/2, so the integrand splits into a constant
  // times the kernel tail plus an algebraically decaying remainder.
  total += (0.5 - 2.0 * wx) * one_sided_tail(spec, z_far);
  auto far = [&](double z) { return w_eval(p, t, x + z) * eval_kernel(spec, z); };
  total += quad::integrate_tail(far, z_far, quad_tol).value;
  return total;
}

double residual_budget(double apply_value, double quad_tol) {
  return std::max(10.0 * quad_tol * std::abs(apply_value), 1e-10);
}

double subsolution_residual(const KernelSpec& spec, const SubsolutionParams& p, double t, double x, double quad_tol) {
  return w_time_derivative(p, t, x) - apply_continuum(spec, p, t, x, quad_tol);
}

double shifted_subsolution(const SubsolutionParams& p, double t, double x) {
  return p.a * w_eval(p, t, x + p.R0 + p.R_C + p.b);
}

std::vector<ResidualSample> residual_grid(const KernelSpec& spec, const SubsolutionParams& p, std::size_t t_count,
                                          std::size_t x_count, double x_lo, double x_hi, double quad_tol) {
  if (t_count == 0 || x_count < 2) throw std::invalid_argument("residual_grid: need t_count >= 1 and x_count >= 2");
  if (!(x_hi > x_lo)) throw std::invalid_argument("residual_grid: need x_hi > x_lo");
  std::vector<ResidualSample> out;
  out.reserve(t_count * x_count);
  for (std::size_t j = 0; j < t_count; ++j) {
    const double t = p.t_star * static_cast<double>(j + 1) / static_cast<double>(t_count + 1);
    for (std::size_t i = 0; i < x_count; ++i) {
      const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(x_count - 1);
      const double d = apply_continuum(spec, p, t, x, quad_tol);
      ResidualSample r{t, x, w_time_derivative(p, t, x) - d, residual_budget(d, quad_tol), false};
      r.pass = r.residual <= r.budget;
      out.push_back(r);
    }
  }
  return out;
}

double convexity_margin(const SubsolutionParams& p, double t, double x_hi, std::size_t samples) {
  const double x_lo = p.region_start();
  if (samples < 2 || !(x_hi > x_lo)) throw std::invalid_argument("convexity_margin: bad sampling window");
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double wx = w_eval(p, t, x);
    for (std::size_t k = 1; k <= samples; ++k) {
      const double z = p.R_C * static_cast<double>(k) / static_cast<double>(samples);
      worst = std::min(worst, w_eval(p, t, x + z) + w_eval(p, t, x - z) - 2.0 * wx);
    }
  }
  return worst;
}

nlohmann::json to_json(const ResidualSample& r) {
  return {{"t", r.t}, {"x", r.x}, {"residual", r.residual}, {"budget", r.budget}, {"pass", r.pass}};
}

}  // namespace nlflat
