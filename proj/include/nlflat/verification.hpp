#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlflat/grid.hpp"
#include "nlflat/kernel.hpp"
#include "nlflat/report.hpp"
#include "nlflat/time_integration.hpp"

namespace nlflat {

enum class DatumKind { step, mollified_step, custom };

/// How a discontinuous step is put on the grid.
enum class StepSampling {
  pointwise,     // a 1_{x <= b} at each node
  cell_average,  // mean of a 1_{(-inf, b]} over [x_i - h/2, x_i + h/2]
};

/// Initial data dominating a plateau a 1_{(-inf, b]}.
class InitialDatum {
 public:
  static InitialDatum step(double a, double b, StepSampling sampling = StepSampling::cell_average);
  /// a (rho_eps * 1_{(-inf, b]}) with rho the normalized bump exp(-1/(1 - (z/eps)^2)).
  static InitialDatum mollified_step(double a, double b, double epsilon = 0.5);
  /// Grid values; rejected unless finite and >= a 1_{x <= b} at every node.
  static InitialDatum custom(double a, double b, const Grid& grid, std::vector<double> values);

  DatumKind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double epsilon() const { return epsilon_; }
  StepSampling sampling() const { return sampling_; }

  Field sample(GridPtr grid) const;

 private:
  InitialDatum(DatumKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  DatumKind kind_;
  double a_;
  double b_;
  double epsilon_ = 0.0;
  StepSampling sampling_ = StepSampling::pointwise;
  std::vector<double> values_;
  std::optional<Grid> custom_grid_;
};

/// int_{-1}^{r} rho for the unit-radius bump; mollifier_cdf(r) + mollifier_cdf(-r) == 1.
double mollifier_cdf(double r);

/// min over snapshots t > 0 and nodes x < b of u(t, x), against a/2 - tol.
VerificationReport halfline_bound_check(const Trajectory& traj, double a, double b, double tol);

/// max over snapshots and node pairs (b + y, b - y) of |v(b + y) + v(b - y) - a|.
/// The grid must be symmetric about b.
VerificationReport mirror_identity_check(const Trajectory& traj, double a, double b, double tol);

/// Builds the mollified step on `grid`, evolves it with the (a | 0) boundary pair
/// and runs the identity check on every snapshot up to t_final.
VerificationReport mirror_identity_check(const KernelSpec& spec, GridPtr grid, double a, double b, double epsilon,
                                         double t_final, double tol, EvolveOptions evolve_options = {},
                                         std::span<const double> output_times = {});

/// Largest increase u(x_{i+1}) - u(x_i) over all snapshots, against tol.
VerificationReport nonincreasing_check(const Trajectory& traj, double tol);

struct Window {
  double lo;
  double hi;
};

/// [max(R0 + R_C + b, 50 t^{1/(2s)}), 0.8 x_max] with R_C taken at C = kappa t.
Window default_flattening_window(const KernelSpec& spec, const Grid& grid, double t, double b);

/// Radius R0 + R_C + b beyond which the barrier is placed, with C = kappa t.
double flattening_window_floor(const KernelSpec& spec, double t, double b);

/// min over window nodes of x^{2s} u(t, x) / t against kappa a (1 - tol_rel).
VerificationReport flattening_ratio(const Trajectory& traj, const KernelSpec& spec, double t,
                                    std::optional<Window> window = std::nullopt, double a = 1.0, double b = 0.0,
                                    double tol_rel = 0.1);

struct TailFit {
  double slope = 0.0;
  double amplitude = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (log x, log u) on the window: u ~ amplitude x^slope.
TailFit tail_exponent_fit(const Field& field, Window window);
TailFit tail_exponent_fit(std::span<const double> x, std::span<const double> u, Window window);

}  // namespace nlflat
