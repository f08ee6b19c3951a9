#include "nlflat/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlflat/errors.hpp"
#include "nlflat/nonlocal_operator.hpp"
#include "nlflat/quadrature.hpp"
#include "nlflat/subsolution.hpp"

namespace nlflat {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double bump(double r) {
  const double q = 1.0 - r * r;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double bump_mass() {
  static const double mass = quad::integrate_singular(bump, -1.0, 1.0, 1e-13, 1e-17).value;
  return mass;
}

void add_grid_metadata(VerificationReport& r, const Grid& g) {
  r.metadata["x_min"] = num(g.x_min());
  r.metadata["x_max"] = num(g.x_max());
  r.metadata["n"] = std::to_string(g.size());
  r.metadata["h"] = num(g.spacing());
}

}  // namespace

double mollifier_cdf(double r) {
  if (r <= -1.0) return 0.0;
  if (r >= 1.0) return 1.0;
  if (r == 0.0) return 0.5;
  if (r > 0.0) return 1.0 - mollifier_cdf(-r);
  return quad::integrate_singular(bump, -1.0, r, 1e-13, 1e-17).value / bump_mass();
}

InitialDatum InitialDatum::step(double a, double b, StepSampling sampling) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("initial datum: a must be positive and finite");
  if (!std::isfinite(b)) throw ConfigError("initial datum: b must be finite");
  InitialDatum d(DatumKind::step, a, b);
  d.sampling_ = sampling;
  return d;
}

InitialDatum InitialDatum::mollified_step(double a, double b, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("initial datum: epsilon must be positive");
  InitialDatum d = step(a, b, StepSampling::pointwise);
  d.kind_ = DatumKind::mollified_step;
  d.epsilon_ = epsilon;
  return d;
}

InitialDatum InitialDatum::custom(double a, double b, const Grid& grid, std::vector<double> values) {
  InitialDatum d = step(a, b, StepSampling::pointwise);
  d.kind_ = DatumKind::custom;
  if (values.size() != grid.size()) throw ConfigError("initial datum: custom values do not match the grid size");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = grid.point(i);
    if (!std::isfinite(values[i])) throw ConfigError("initial datum: custom values must be finite");
    if (x <= b && values[i] < a) {
      std::ostringstream os;
      os.precision(17);
      os << "initial datum: value " << values[i] << " at x=" << x << " is below the plateau a=" << a;
      throw ConfigError(os.str());
    }
  }
  d.values_ = std::move(values);
  d.custom_grid_ = grid;
  return d;
}

Field InitialDatum::sample(GridPtr grid) const {
  const std::size_t n = grid->size();
  std::vector<double> v(n);
  switch (kind_) {
    case DatumKind::step: {
      const double h = grid->spacing();
      for (std::size_t i = 0; i < n; ++i) {
        const double x = grid->point(i);
        if (sampling_ == StepSampling::pointwise) {
          v[i] = x <= b_ ? a_ : 0.0;
        } else {
          v[i] = a_ * std::clamp((b_ - (x - 0.5 * h)) / h, 0.0, 1.0);
        }
      }
      break;
    }
    case DatumKind::mollified_step:
      // rho_eps * 1_{(-inf, b]} (x) = P(Z <= (b - x)/eps) for Z ~ rho
      for (std::size_t i = 0; i < n; ++i) v[i] = a_ * mollifier_cdf((b_ - grid->point(i)) / epsilon_);
      break;
    case DatumKind::custom:
      if (!(*custom_grid_ == *grid)) throw GridMismatch("initial datum: custom data was given on a different grid");
      v = values_;
      break;
  }
  return Field(std::move(grid), 0.0, std::move(v));
}

VerificationReport halfline_bound_check(const Trajectory& traj, double a, double b, double tol) {
  const Grid& g = traj.grid();
  if (!(g.x_min() < b)) throw DomainError("halfline_bound_check: no grid points left of b");
  VerificationReport r;
  r.check = "halfline_bound";
  r.bound = 0.5 * a;
  r.tolerance = tol;
  r.measured = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const Field& f : traj.states()) {
    if (!(f.time() > 0.0)) continue;
    for (std::size_t i = 0; i < f.size() && g.point(i) < b; ++i) {
      any = true;
      if (f[i] < r.measured) {
        r.measured = f[i];
        r.worst_t = f.time();
        r.worst_x = g.point(i);
      }
    }
  }
  if (!any) throw DomainError("halfline_bound_check: no snapshot with t > 0");
  r.pass = r.measured >= r.bound - tol;
  r.metadata["a"] = num(a);
  r.metadata["b"] = num(b);
  add_grid_metadata(r, g);
  return r;
}

VerificationReport mirror_identity_check(const Trajectory& traj, double a, double b, double tol) {
  const Grid& g = traj.grid();
  const double scale = std::max({std::abs(g.x_min()), std::abs(g.x_max()), std::abs(b), 1.0});
  if (std::abs(g.x_min() + g.x_max() - 2.0 * b) > 1e-12 * scale) {
    throw DomainError("mirror_identity_check: grid [" + num(g.x_min()) + ", " + num(g.x_max()) +
                      "] is not symmetric about b=" + num(b));
  }
  VerificationReport r;
  r.check = "mirror_identity";
  r.bound = tol;
  r.tolerance = tol;
  const std::size_t n = g.size();
  for (const Field& f : traj.states()) {
    for (std::size_t i = 0; i <= (n - 1) / 2; ++i) {
      const double dev = std::abs(f[i] + f[n - 1 - i] - a);
      if (dev > r.measured) {
        r.measured = dev;
        r.worst_t = f.time();
        r.worst_x = g.point(n - 1 - i) - b;
      }
    }
  }
  r.pass = r.measured <= tol;
  r.metadata["a"] = num(a);
  r.metadata["b"] = num(b);
  add_grid_metadata(r, g);
  return r;
}

VerificationReport mirror_identity_check(const KernelSpec& spec, GridPtr grid, double a, double b, double epsilon,
                                         double t_final, double tol, EvolveOptions evolve_options,
                                         std::span<const double> output_times) {
  const auto datum = InitialDatum::mollified_step(a, b, epsilon);
  const auto op = discretize(spec, grid, BoundaryModel{a, RightZero{}});
  const auto traj = evolve(op, datum.sample(grid), t_final, output_times, evolve_options);
  auto r = mirror_identity_check(traj, a, b, tol);
  r.metadata["kernel"] = spec.id().empty() ? spec.family_name() : spec.id();
  r.metadata["epsilon"] = num(epsilon);
  r.metadata["t_final"] = num(t_final);
  return r;
}

VerificationReport nonincreasing_check(const Trajectory& traj, double tol) {
  const Grid& g = traj.grid();
  VerificationReport r;
  r.check = "nonincreasing";
  r.bound = tol;
  r.tolerance = tol;
  r.measured = -std::numeric_limits<double>::infinity();
  for (const Field& f : traj.states()) {
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
      const double rise = f[i + 1] - f[i];
      if (rise > r.measured) {
        r.measured = rise;
        r.worst_t = f.time();
        r.worst_x = g.point(i);
      }
    }
  }
  r.pass = r.measured <= tol;
  add_grid_metadata(r, g);
  return r;
}

double flattening_window_floor(const KernelSpec& spec, double t, double b) {
  const double C = kappa(spec) * t;
  return spec.declared().R0 + scaling_constants(spec, C).R_C + b;
}

Window default_flattening_window(const KernelSpec& spec, const Grid& grid, double t, double b) {
  return {std::max(flattening_window_floor(spec, t, b), 50.0 * std::pow(t, 1.0 / (2.0 * spec.s()))),
          0.8 * grid.x_max()};
}

VerificationReport flattening_ratio(const Trajectory& traj, const KernelSpec& spec, double t,
                                    std::optional<Window> window, double a, double b, double tol_rel) {
  if (!(t > 0.0)) throw DomainError("flattening_ratio: t must be a positive snapshot time");
  const Field& f = traj.at(t);
  const Grid& g = f.grid();
  const Window w = window.value_or(default_flattening_window(spec, g, t, b));
  if (!(w.hi > w.lo)) throw DomainError("flattening_ratio: empty window");
  if (w.hi > 0.8 * g.x_max()) throw DomainError("flattening_ratio: window reaches past 0.8 x_max");
  const double floor = flattening_window_floor(spec, t, b);
  if (w.lo < floor) throw DomainError("flattening_ratio: window starts below R0 + R_C + b = " + num(floor));

  const double s = spec.s();
  VerificationReport r;
  r.check = "flattening_ratio";
  r.bound = kappa(spec) * a;
  r.tolerance = tol_rel;
  r.measured = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.point(i);
    if (x < w.lo || x > w.hi) continue;
    ++count;
    const double ratio = std::pow(x, 2.0 * s) * f[i] / t;
    if (ratio < r.measured) {
      r.measured = ratio;
      r.worst_x = x;
    }
  }
  if (count == 0) throw DomainError("flattening_ratio: no grid points in the window");
  r.worst_t = t;
  r.pass = r.measured >= r.bound * (1.0 - tol_rel);
  r.metadata["kernel"] = spec.id().empty() ? spec.family_name() : spec.id();
  r.metadata["s"] = num(s);
  r.metadata["kappa"] = num(kappa(spec));
  r.metadata["a"] = num(a);
  r.metadata["b"] = num(b);
  r.metadata["window_lo"] = num(w.lo);
  r.metadata["window_hi"] = num(w.hi);
  r.metadata["window_points"] = std::to_string(count);
  add_grid_metadata(r, g);
  return r;
}

TailFit tail_exponent_fit(std::span<const double> x, std::span<const double> u, Window window) {
  if (x.size() != u.size()) throw std::invalid_argument("tail_exponent_fit: size mismatch");
  if (!(window.lo > 0.0) || !(window.hi >= 10.0 * window.lo)) {
    throw DomainError("tail_exponent_fit: window must be positive and span at least one decade");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < window.lo || x[i] > window.hi) continue;
    if (!(u[i] > 0.0)) throw DomainError("tail_exponent_fit: nonpositive value at x=" + num(x[i]));
    const double lx = std::log(x[i]);
    const double ly = std::log(u[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
    ++m;
  }
  if (m < 2) throw DomainError("tail_exponent_fit: fewer than two points in the window");
  const double md = static_cast<double>(m);
  const double cxx = sxx - sx * sx / md;
  const double cxy = sxy - sx * sy / md;
  const double cyy = syy - sy * sy / md;
  TailFit fit;
  fit.points = m;
  fit.slope = cxy / cxx;
  fit.amplitude = std::exp((sy - fit.slope * sx) / md);
  fit.r2 = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
  return fit;
}

TailFit tail_exponent_fit(const Field& field, Window window) {
  const auto xs = field.grid().points();
  return tail_exponent_fit(xs, field.values(), window);
}

}  // namespace nlflat
