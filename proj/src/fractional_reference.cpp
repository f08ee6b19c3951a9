#include "nlflat/fractional_reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlflat/errors.hpp"
#include "nlflat/quadrature.hpp"

namespace nlflat {

namespace {

constexpr double kPi = std::numbers::pi;
// exp(-40) ~ 4e-18: amplitude cutoff of the Fourier integrand.
constexpr double kDecayExponent = 40.0;
// Self-similar radius beyond which the large-|x| expansion is tried first.
constexpr double kSeriesRadius = 12.0;
constexpr std::size_t kDirectIntervals = 48;
constexpr std::size_t kMaxIntervals = 4000;

void check_args(double s, double t) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("heat kernel: s must lie in (0, 1]");
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("heat kernel: t must be positive");
}

/// Last even column of Wynn's epsilon table over partial sums S. `err` gets the
/// distance to the previous even-column estimate.
double wynn_epsilon(const std::vector<double>& S, double& err) {
  const std::size_t n = S.size();
  std::vector<double> prev(n + 1, 0.0);  // epsilon_{k-1}
  std::vector<double> cur(S);            // epsilon_k
  double best = S.back();
  double previous_best = n >= 2 ? S[n - 2] : S.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(n - k);
    for (std::size_t j = 0; j + 1 < cur.size(); ++j) {
      const double d = cur[j + 1] - cur[j];
      if (d == 0.0 || !std::isfinite(d)) {
        err = std::abs(best - previous_best);
        return best;
      }
      next[j] = prev[j + 1] + 1.0 / d;
    }
    if (k % 2 == 0) {
      if (!std::isfinite(next.back())) break;
      previous_best = best;
      best = next.back();
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  err = std::abs(best - previous_best);
  return best;
}

/// int_0^inf f, where f changes sign at first_zero + k * spacing and is
/// negligible beyond xi_end. The first lobe goes to the double-exponential
/// rule (f may have an algebraic-type endpoint at 0), the rest to Kronrod.
quad::Result oscillatory_integral(const auto& f, double first_zero, double spacing, double xi_end, double rel_tol) {
  quad::Result total;
  auto first = quad::integrate_singular(f, 0.0, std::min(first_zero, xi_end), rel_tol, 1e-300);
  total.value = first.value;
  total.error = first.error;
  total.l1 = first.l1;
  if (first_zero >= xi_end) return total;

  std::vector<double> partial{total.value};
  double a = first_zero;
  double accelerated = total.value;
  double accel_err = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= kMaxIntervals; ++k) {
    const double b = a + spacing;
    auto piece = quad::integrate(f, a, b, rel_tol, 1e-300);
    total.value += piece.value;
    total.error += piece.error;
    total.l1 += piece.l1;
    partial.push_back(total.value);
    a = b;
    if (a >= xi_end) return total;
    if (k >= kDirectIntervals) {
      // Accelerate on a sliding window of the partial sums.
      const std::size_t w = std::min<std::size_t>(partial.size(), 40);
      std::vector<double> window(partial.end() - static_cast<std::ptrdiff_t>(w), partial.end());
      double e = 0.0;
      const double est = wynn_epsilon(window, e);
      const double tol = rel_tol * std::max(std::abs(est), 1e-3 * total.l1);
      if (std::abs(est - accelerated) <= tol && e <= tol) {
        return {est, std::max(e, std::abs(est - accelerated)) + total.error, total.l1};
      }
      accel_err = std::abs(est - accelerated);
      accelerated = est;
    }
  }
  std::ostringstream os;
  os << "oscillatory integral did not converge after " << kMaxIntervals << " lobes (last change " << accel_err << ")";
  throw QuadratureError(os.str());
}

double xi_cutoff(double s, double t) { return std::pow(kDecayExponent / t, 1.0 / (2.0 * s)); }

HeatKernelValue fourier_heat_kernel(double s, double t, double x, double rel_tol) {
  const double ax = std::abs(x);
  const double xi_end = xi_cutoff(s, t);
  auto f = [&](double xi) { return std::exp(-t * std::pow(xi, 2.0 * s)) * std::cos(ax * xi); };
  quad::Result r;
  if (ax == 0.0 || ax * xi_end < 0.5 * kPi) {
    r = quad::integrate_singular(f, 0.0, xi_end, rel_tol, 1e-300);
  } else {
    r = oscillatory_integral(f, 0.5 * kPi / ax, kPi / ax, xi_end, rel_tol);
  }
  return {r.value / kPi, r.error / kPi, HeatKernelMethod::fourier_inversion};
}

/// Sum of the large-|y| expansion sum_k c_k y^{-(2sk + shift)} / (2sk)^{integrated}
/// for p_s(1, y) (integrated = false) or its upper tail int_y^inf p_s(1, .) (integrated = true).
/// Returns false when the terms stop decreasing before reaching working precision.
bool large_y_series(double s, double y, bool integrated, double& value, double& err) {
  value = 0.0;
  err = std::numeric_limits<double>::infinity();
  const double ly = std::log(y);
  double last_mag = std::numeric_limits<double>::infinity();
  int small_run = 0;
  for (int k = 1; k <= 4000; ++k) {
    const double kd = k;
    const double sn = std::sin(kPi * s * kd);
    const double log_mag = std::lgamma(2.0 * s * kd + 1.0) - std::lgamma(kd + 1.0) -
                           (2.0 * s * kd + (integrated ? 0.0 : 1.0)) * ly;
    double mag = std::exp(log_mag) / kPi;
    if (integrated) mag /= 2.0 * s * kd;
    if (mag > last_mag && mag > 1e-300) return false;  // asymptotic series started to diverge
    last_mag = mag;
    const double term = (k % 2 == 1 ? 1.0 : -1.0) * sn * mag;
    value += term;
    if (mag <= 1e-17 * std::abs(value)) {
      if (++small_run >= 3) {
        err = mag + 1e-16 * std::abs(value);
        return true;
      }
    } else {
      small_run = 0;
    }
  }
  return false;
}

}  // namespace

const char* method_name(HeatKernelMethod m) {
  switch (m) {
    case HeatKernelMethod::closed_form: return "closed_form";
    case HeatKernelMethod::fourier_inversion: return "fourier_inversion";
    case HeatKernelMethod::series: return "series";
  }
  return "unknown";
}

double heat_kernel_tail_coefficient(double s) {
  return std::tgamma(2.0 * s + 1.0) * std::sin(kPi * s) / kPi;
}

HeatKernelValue heat_kernel_value(double s, double t, double x, HeatKernelOptions options) {
  check_args(s, t);
  if (!options.force_fourier) {
    if (s == 0.5) return {t / (kPi * (t * t + x * x)), 0.0, HeatKernelMethod::closed_form};
    if (s == 1.0) return {std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * kPi * t), 0.0, HeatKernelMethod::closed_form};
    const double scale = std::pow(t, -1.0 / (2.0 * s));
    const double y = std::abs(x) * scale;
    if (y >= kSeriesRadius) {
      double v = 0.0, e = 0.0;
      if (large_y_series(s, y, false, v, e)) return {scale * v, scale * e, HeatKernelMethod::series};
    }
  }
  return fourier_heat_kernel(s, t, x, options.rel_tol);
}

double fractional_heat_kernel(double s, double t, double x) { return heat_kernel_value(s, t, x).value; }

HeatKernelEval evaluate_heat_kernel(double s, double t, std::span<const double> xs, HeatKernelOptions options) {
  HeatKernelEval out;
  out.s = s;
  out.t = t;
  out.x.assign(xs.begin(), xs.end());
  out.p.reserve(xs.size());
  out.method.reserve(xs.size());
  for (double x : xs) {
    const auto v = heat_kernel_value(s, t, x, options);
    out.p.push_back(v.value);
    out.method.push_back(v.method);
    out.error_estimate = std::max(out.error_estimate, v.error);
  }
  return out;
}

MassEstimate heat_kernel_mass(double s, double t) {
  check_args(s, t);
  const double scale = std::pow(t, 1.0 / (2.0 * s));
  const double y_far = 20.0;
  auto p = [&](double x) { return fractional_heat_kernel(s, t, x); };
  MassEstimate m;
  double lo = 0.0;
  for (double c : {0.5, 1.0, 2.0, 4.0, 8.0, y_far}) {
    const auto r = quad::integrate(p, lo, c * scale, 1e-11);
    m.mass += r.value;
    m.error += r.error;
    lo = c * scale;
  }
  if (s < 1.0) {
    double tail = 0.0, err = 0.0;
    if (!large_y_series(s, y_far, true, tail, err)) throw QuadratureError("heat_kernel_mass: tail series failed");
    m.mass += tail;
    m.error += err;
  }
  m.mass *= 2.0;
  m.error *= 2.0;
  return m;
}

double reference_solution(double s, double a, double b, double t, double x) {
  check_args(s, t);
  const double y0 = x - b;
  if (s == 0.5) {
    // 1/2 - atan(y)/pi, written without cancellation for y > 0
    if (y0 > 0.0) return a * std::atan(t / y0) / kPi;
    return a * (0.5 - std::atan(y0 / t) / kPi);
  }
  if (s == 1.0) return 0.5 * a * std::erfc(y0 / (2.0 * std::sqrt(t)));
  if (y0 == 0.0) return 0.5 * a;
  const double ay = std::abs(y0);
  const double scale = std::pow(t, -1.0 / (2.0 * s));
  double upper = 0.0;  // int_{|y0|}^inf p
  double v = 0.0, e = 0.0;
  if (ay * scale >= kSeriesRadius && large_y_series(s, ay * scale, true, v, e)) {
    upper = v;
  } else {
    const double xi_end = xi_cutoff(s, t);
    auto f = [&](double xi) {
      if (xi == 0.0) return ay;
      return std::exp(-t * std::pow(xi, 2.0 * s)) * std::sin(ay * xi) / xi;
    };
    quad::Result r;
    if (ay * xi_end < kPi)
      r = quad::integrate_singular(f, 0.0, xi_end, 1e-12, 1e-300);
    else
      r = oscillatory_integral(f, kPi / ay, kPi / ay, xi_end, 1e-12);
    upper = 0.5 - r.value / kPi;
  }
  return a * (y0 > 0.0 ? upper : 1.0 - upper);
}

HeatKernelBoundsFit heat_kernel_bounds_fit(double s, std::span<const double> t_samples,
                                           std::span<const double> x_samples) {
  if (t_samples.empty() || x_samples.empty()) throw std::invalid_argument("bounds fit: empty sample set");
  HeatKernelBoundsFit fit;
  fit.min_ratio = std::numeric_limits<double>::infinity();
  fit.max_ratio = 0.0;
  for (double t : t_samples) {
    const double scale = std::pow(t, 1.0 / (2.0 * s));
    for (double x : x_samples) {
      const double y = std::abs(x) / scale;
      const double ratio = fractional_heat_kernel(s, t, x) * scale * (1.0 + std::pow(y, 1.0 + 2.0 * s));
      fit.min_ratio = std::min(fit.min_ratio, ratio);
      fit.max_ratio = std::max(fit.max_ratio, ratio);
      ++fit.samples;
    }
  }
  fit.C1 = std::max({1.0, fit.max_ratio, fit.min_ratio > 0.0 ? 1.0 / fit.min_ratio : std::numeric_limits<double>::infinity()});

  const double t = t_samples.front();
  const double x_far = 1e6 * std::pow(t, 1.0 / (2.0 * s));
  fit.limit_measured = std::pow(x_far, 2.0 * s) * reference_solution(s, 1.0, 0.0, t, x_far) / t;
  fit.limit_bound = 1.0 / fit.C1;
  fit.limit_bound_exact_integral = 1.0 / (2.0 * s * fit.C1);
  return fit;
}

}  // namespace nlflat
