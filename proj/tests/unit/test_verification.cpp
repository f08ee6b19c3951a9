#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nlflat/errors.hpp"
#include "nlflat/fractional_reference.hpp"
#include "nlflat/subsolution.hpp"
#include "nlflat/verification.hpp"
#include "oracles.hpp"

using namespace nlflat;

namespace {

/// Snapshots of the Cauchy step solution a (1/2 - atan((x - b)/t)/pi).
Trajectory cauchy_trajectory(GridPtr grid, double a, double b, std::initializer_list<double> times) {
  auto snapshot = [&](double t) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double x = grid->point(i);
      v[i] = t > 0.0 ? reference_solution(0.5, a, b, t, x) : (x < b ? a : x == b ? 0.5 * a : 0.0);
    }
    return Field(grid, t, std::move(v));
  };
  Trajectory traj(snapshot(0.0));
  for (double t : times) traj.push(snapshot(t));
  return traj;
}

}  // namespace

TEST(Mollifier, CdfAgainstQuadrature) {
  auto bump = [](double r) { return r * r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; };
  const double mass = oracle::integrate(bump, -1.0, 1.0, 64);
  for (double r : {-0.9, -0.4, 0.1, 0.7}) {
    EXPECT_NEAR(mollifier_cdf(r), oracle::integrate(bump, -1.0, r, 64) / mass, 1e-13) << r;
  }
  EXPECT_EQ(mollifier_cdf(0.0), 0.5);
  EXPECT_EQ(mollifier_cdf(-1.5), 0.0);
  EXPECT_EQ(mollifier_cdf(2.0), 1.0);
  for (double r : {0.05, 0.3, 0.99}) EXPECT_NEAR(mollifier_cdf(r) + mollifier_cdf(-r), 1.0, 1e-15);
}

TEST(InitialDatum, StepSampling) {
  auto grid = make_grid(-2.0, 2.0, 41);
  const auto pointwise = InitialDatum::step(3.0, 0.0, StepSampling::pointwise).sample(grid);
  const auto averaged = InitialDatum::step(3.0, 0.0).sample(grid);
  EXPECT_EQ(pointwise[20], 3.0);
  EXPECT_EQ(pointwise[21], 0.0);
  EXPECT_NEAR(averaged[20], 1.5, 1e-12);
  EXPECT_EQ(averaged[19], 3.0);
  EXPECT_EQ(averaged[21], 0.0);
  const auto off = InitialDatum::step(1.0, 0.025).sample(grid);
  EXPECT_NEAR(off[20], 0.75, 1e-12);
  EXPECT_EQ(averaged.time(), 0.0);
}

TEST(InitialDatum, MollifiedStepIsAntisymmetricAboutEdge) {
  auto grid = make_grid(-3.0, 5.0, 81);
  const auto u = InitialDatum::mollified_step(2.0, 1.0, 0.5).sample(grid);
  for (std::size_t i = 0; i < 81; ++i) EXPECT_NEAR(u[i] + u[80 - i], 2.0, 1e-14);
  EXPECT_EQ(u[0], 2.0);
  EXPECT_EQ(u[80], 0.0);
  EXPECT_NEAR(u[40], 1.0, 1e-15);
}

TEST(InitialDatum, Validation) {
  auto grid = make_grid(-1.0, 1.0, 21);
  EXPECT_THROW(InitialDatum::step(0.0, 0.0), ConfigError);
  EXPECT_THROW(InitialDatum::step(1.0, NAN), ConfigError);
  EXPECT_THROW(InitialDatum::mollified_step(1.0, 0.0, 0.0), ConfigError);
  std::vector<double> v(21, 1.0);
  v[3] = 0.9;
  EXPECT_THROW(InitialDatum::custom(1.0, 0.0, *grid, v), ConfigError);
  v[3] = 2.0;
  const auto d = InitialDatum::custom(1.0, 0.0, *grid, v);
  EXPECT_EQ(d.sample(grid)[3], 2.0);
  EXPECT_THROW(d.sample(make_grid(-1.0, 1.0, 23)), GridMismatch);
  EXPECT_THROW(InitialDatum::custom(1.0, 0.0, *grid, std::vector<double>(20, 1.0)), ConfigError);
}

TEST(HalflineBound, ExactSolutionPasses) {
  auto grid = make_grid(-100.0, 100.0, 2001);
  const auto traj = cauchy_trajectory(grid, 2.0, 10.0, {0.25, 0.5, 1.0});
  const auto r = halfline_bound_check(traj, 2.0, 10.0, 0.04);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.measured, 1.0);
  EXPECT_EQ(r.bound, 1.0);
  EXPECT_LT(r.worst_x, 10.0);
  EXPECT_EQ(r.worst_t, 1.0);
}

TEST(HalflineBound, DetectsDeficit) {
  auto grid = make_grid(-10.0, 10.0, 201);
  Trajectory traj(Field(grid, 0.0, std::vector<double>(201, 1.0)));
  std::vector<double> low(201, 1.0);
  low[50] = 0.45;
  traj.push(Field(grid, 0.5, low));
  const auto r = halfline_bound_check(traj, 1.0, 0.0, 0.02);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.measured, 0.45);
  EXPECT_EQ(r.worst_x, grid->point(50));
  EXPECT_THROW(halfline_bound_check(traj, 1.0, -20.0, 0.02), DomainError);
}

TEST(MirrorIdentity, ExactSolutionSatisfiesIt) {
  auto grid = make_grid(-90.0, 110.0, 2001);
  const auto traj = cauchy_trajectory(grid, 1.0, 10.0, {0.5, 1.0});
  const auto r = mirror_identity_check(traj, 1.0, 10.0, 1e-12);
  EXPECT_TRUE(r.pass) << r.measured;
  const auto shifted = cauchy_trajectory(make_grid(-100.0, 100.0, 2001), 1.0, 10.0, {1.0});
  EXPECT_THROW(mirror_identity_check(shifted, 1.0, 10.0, 0.02), DomainError);
}

TEST(MirrorIdentity, DetectsAsymmetry) {
  auto grid = make_grid(-10.0, 10.0, 201);
  std::vector<double> v(201);
  for (std::size_t i = 0; i < 201; ++i) v[i] = grid->point(i) < 0.0 ? 1.0 : 0.1;
  v[100] = 0.5;
  const Trajectory traj(Field(grid, 0.0, v));
  const auto r = mirror_identity_check(traj, 1.0, 0.0, 0.02);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.measured, 0.1, 1e-15);
}

TEST(MirrorIdentity, SolverRunShrinksUnderRefinement) {
  const auto spec = cauchy_kernel();
  const std::vector<double> outs{0.5};
  const auto coarse = mirror_identity_check(spec, make_grid(-40.0, 40.0, 801), 1.0, 0.0, 0.5, 1.0, 0.02, {}, outs);
  const auto fine = mirror_identity_check(spec, make_grid(-80.0, 80.0, 3201), 1.0, 0.0, 0.5, 1.0, 0.02, {}, outs);
  EXPECT_TRUE(coarse.pass);
  EXPECT_TRUE(fine.pass);
  EXPECT_LE(fine.measured, std::max(coarse.measured, 1e-12));
}

TEST(Nonincreasing, ExactSolutionAndViolation) {
  auto grid = make_grid(-50.0, 50.0, 501);
  EXPECT_TRUE(nonincreasing_check(cauchy_trajectory(grid, 1.0, 0.0, {1.0}), 1e-12).pass);
  std::vector<double> v(501, 0.0);
  v[100] = 0.3;
  const auto r = nonincreasing_check(Trajectory(Field(grid, 0.0, v)), 1e-12);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.measured, 0.3);
  EXPECT_EQ(r.worst_x, grid->point(99));
}

TEST(Flattening, ExactCauchySolution) {
  const auto spec = cauchy_kernel();
  auto grid = make_grid(-200.0, 4000.0, 42001);
  const auto traj = cauchy_trajectory(grid, 1.0, 0.0, {1.0});
  const auto r = flattening_ratio(traj, spec, 1.0, Window{100.0, 3000.0});
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.measured, 1.0 / std::numbers::pi, 1e-4);
  EXPECT_EQ(r.bound, kappa(spec));
  const auto d = flattening_ratio(traj, spec, 1.0);
  EXPECT_TRUE(d.pass);
}

TEST(Flattening, WindowGuards) {
  const auto spec = cauchy_kernel();
  auto grid = make_grid(-200.0, 4000.0, 4201);
  const auto traj = cauchy_trajectory(grid, 1.0, 0.0, {1.0});
  EXPECT_THROW(flattening_ratio(traj, spec, 1.0, Window{100.0, 3500.0}), DomainError);
  const double floor = flattening_window_floor(spec, 1.0, 0.0);
  EXPECT_THROW(flattening_ratio(traj, spec, 1.0, Window{0.5 * floor, 3000.0}), DomainError);
  EXPECT_THROW(flattening_ratio(traj, spec, 0.5, Window{100.0, 3000.0}), std::out_of_range);
  EXPECT_THROW(flattening_ratio(traj, spec, 1.0, Window{200.0, 100.0}), DomainError);
  const auto w = default_flattening_window(spec, *grid, 1.0, 0.0);
  EXPECT_EQ(w.hi, 3200.0);
  EXPECT_GE(w.lo, floor);
  EXPECT_GE(w.lo, 50.0);
}

TEST(Flattening, RatioStableAcrossDecade) {
  for (double t : {0.5, 1.0, 2.0}) {
    const double near = 100.0 * t * reference_solution(0.5, 1.0, 0.0, t, 100.0 * t) / t;
    const double far = 1000.0 * t * reference_solution(0.5, 1.0, 0.0, t, 1000.0 * t) / t;
    EXPECT_LT(std::abs(near - far) / far, 0.02);
  }
}

TEST(TailFit, RecoversPowerLaw) {
  std::vector<double> x, u;
  for (double v = 10.0; v <= 1e4; v *= 1.1) {
    x.push_back(v);
    u.push_back(0.3 * std::pow(v, -2.0));
  }
  const auto fit = tail_exponent_fit(x, u, Window{10.0, 1e4});
  EXPECT_NEAR(fit.slope, -2.0, 1e-12);
  EXPECT_NEAR(fit.amplitude, 0.3, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
  EXPECT_EQ(fit.points, x.size());
}

TEST(TailFit, HeatKernelSlopes) {
  for (double s : {0.5, 0.75}) {
    std::vector<double> x, u;
    for (double v = 100.0; v <= 1000.0; v *= 1.05) {
      x.push_back(v);
      u.push_back(fractional_heat_kernel(s, 1.0, v));
    }
    const auto fit = tail_exponent_fit(x, u, Window{100.0, 1000.0});
    EXPECT_NEAR(fit.slope, -(1.0 + 2.0 * s), 0.05 * (1.0 + 2.0 * s));
  }
}

TEST(TailFit, CauchySolutionDecaysLikeInverseX) {
  auto grid = make_grid(0.0, 1000.0, 10001);
  const auto traj = cauchy_trajectory(grid, 1.0, 0.0, {1.0});
  const auto fit = tail_exponent_fit(traj.back(), Window{100.0, 1000.0});
  EXPECT_NEAR(fit.slope, -1.0, 0.05);
}

TEST(TailFit, GaussianUnderflowsOnFarWindow) {
  auto grid = make_grid(0.0, 1000.0, 1001);
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fractional_heat_kernel(1.0, 1.0, grid->point(i));
  EXPECT_THROW(tail_exponent_fit(Field(grid, 1.0, v), Window{100.0, 1000.0}), DomainError);
}

TEST(TailFit, Guards) {
  const std::vector<double> x{1.0, 2.0, 5.0, 10.0}, u{1.0, 0.5, 0.0, 0.1};
  EXPECT_THROW(tail_exponent_fit(x, u, Window{1.0, 10.0}), DomainError);
  EXPECT_THROW(tail_exponent_fit(x, u, Window{1.0, 5.0}), DomainError);
  EXPECT_THROW(tail_exponent_fit(x, u, Window{-1.0, 10.0}), DomainError);
  EXPECT_THROW(tail_exponent_fit(x, std::vector<double>{1.0}, Window{1.0, 10.0}), std::invalid_argument);
}
