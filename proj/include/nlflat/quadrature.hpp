#pragma once

// Thin wrappers around Boost.Math adaptive quadrature. Every caller in the
// library goes through these so tolerance handling and failure reporting are
// uniform: a result whose error estimate misses the requested tolerance is an
// exception, never a silently degraded number.

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "nlflat/errors.hpp"

namespace nlflat::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;  // integral of |f|, the scale the relative tolerance refers to
};

inline constexpr unsigned kMaxDepth = 24;

namespace detail {

[[noreturn]] inline void fail(const char* what, double a, double b, const Result& r, double tol) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": no convergence on [" << a << ", " << b << "], value=" << r.value
     << " error=" << r.error << " L1=" << r.l1 << " requested rel tol=" << tol;
  throw QuadratureError(os.str());
}

inline bool acceptable(const Result& r, double rel_tol, double abs_tol) {
  if (!std::isfinite(r.value) || !std::isfinite(r.error)) return false;
  // slack over the (pessimistic) Kronrod estimate
  return r.error <= 10.0 * std::max(rel_tol * r.l1, abs_tol);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (15/31) on a finite interval [a, b].
template <class F>
Result integrate(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0) {
  Result r;
  if (a == b) return r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, kMaxDepth, rel_tol, &r.error, &r.l1);
  if (!detail::acceptable(r, rel_tol, abs_tol)) detail::fail("gauss_kronrod", a, b, r, rel_tol);
  return r;
}

/// Double-exponential quadrature on [a, b]; tolerates integrable endpoint singularities.
template <class F>
Result integrate_singular(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0) {
  Result r;
  if (a == b) return r;
  // Boost 1.74 declares integrate() const but defines it non-const; one
  // instance per thread keeps concurrent callers apart.
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  std::size_t levels = 0;
  r.value = integrator.integrate(f, a, b, rel_tol, &r.error, &r.l1, &levels);
  if (!detail::acceptable(r, rel_tol, abs_tol)) detail::fail("tanh_sinh", a, b, r, rel_tol);
  return r;
}

/// Integral of f over [a, inf) for a > 0 through the substitution z = a/u, u in (0, 1].
/// Algebraically decaying integrands map to (at worst) integrable endpoint
/// singularities at u = 0, which the double-exponential rule handles.
template <class F>
Result integrate_tail(F&& f, double a, double rel_tol, double abs_tol = 0.0) {
  if (!(a > 0.0)) throw std::invalid_argument("integrate_tail: lower limit must be positive");
  auto g = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double z = a / u;
    if (!std::isfinite(z)) return 0.0;
    return f(z) * (a / u) / u;
  };
  return integrate_singular(g, 0.0, 1.0, rel_tol, abs_tol);
}

}  // namespace nlflat::quad
