#include <cmath>

#include <gtest/gtest.h>

#include "nlflat/errors.hpp"
#include "nlflat/subsolution.hpp"
#include "oracles.hpp"

using namespace nlflat;

namespace {

KernelSpec pure(double s, double J0 = 1.0, double R0 = 2.0) {
  return KernelSpec(PureFractional{1.0}, s, {J0, 1.0, R0}, "pure");
}

/// D[w](t, x) for the pure kernel |z|^{-1-2s}, summed piecewise with the jump to the plateau at z = x.
/// Offsets below z0 = 1e-5 x use w''(x) z^2.
double oracle_apply(const SubsolutionParams& p, double t, double x) {
  const double k = p.kappa * t, q = 2.0 * p.s;
  auto w = [&](double y) { return y <= 0.0 ? 0.5 : k / (std::pow(y, q) + 2.0 * k); };
  auto f = [&](double z) { return (w(x + z) + w(x - z) - 2.0 * w(x)) * std::pow(z, -1.0 - q); };
  const double D = std::pow(x, q) + 2.0 * k;
  const double d1 = q * std::pow(x, q - 1.0);
  const double w2 = k * (2.0 * d1 * d1 / (D * D * D) - q * (q - 1.0) * std::pow(x, q - 2.0) / (D * D));
  const double z0 = 1e-5 * x;
  double total = w2 * std::pow(z0, 2.0 - q) / (2.0 - q);
  for (double hi = 0.5 * x; hi > z0; hi *= 0.5) total += oracle::integrate(f, std::max(0.5 * hi, z0), hi, 2);
  return total + oracle::integrate(f, 0.5 * x, x, 64) + oracle::integrate(f, x, 4.0 * x, 256) +
         oracle::integrate_to_infinity(f, 4.0 * x);
}

}  // namespace

TEST(Constants, ReferenceValues) {
  EXPECT_EQ(kappa(pure(0.5)), 0.25);
  auto sc = scaling_constants(pure(0.5), 2.0);
  EXPECT_EQ(sc.t_star, 16.0);
  EXPECT_EQ(sc.R_C, 16.0);
  sc = scaling_constants(pure(0.5), 0.5);
  EXPECT_EQ(sc.t_star, 4.0);
  EXPECT_EQ(sc.R_C, 4.0);
  sc = scaling_constants(pure(0.25), 1.0);
  EXPECT_EQ(sc.t_star, 4.0);
  EXPECT_EQ(sc.R_C, 64.0);
  EXPECT_THROW(scaling_constants(pure(0.5), 0.0), std::invalid_argument);
}

TEST(Constants, ExactIdentities) {
  for (double s : {0.25, 0.5, 0.75}) {
    for (double J0 : {1.0, 2.0, 0.5}) {
      for (double C : {0.5, 1.0, 2.0, 4.0}) {
        const auto p = make_subsolution_params(pure(s, J0), C);
        EXPECT_EQ(p.kappa * 8.0 * s * J0, 1.0);
        EXPECT_EQ(p.t_star * p.kappa, 2.0 * C);
        EXPECT_NEAR(std::pow(p.R_C, 2.0 * s), 8.0 * C * J0 * J0, 1e-12 * 8.0 * C * J0 * J0);
      }
    }
  }
}

TEST(Barrier, Values) {
  const auto p = make_subsolution_params(pure(0.5), 2.0);
  EXPECT_EQ(w_eval(p, 1.0, -3.0), 0.5);
  EXPECT_EQ(w_eval(p, 1.0, 0.0), 0.5);
  EXPECT_NEAR(w_eval(p, 1.0, 1e-14), 0.5, 1e-13);
  EXPECT_NEAR(w_eval(p, 1.0, 2.0), 0.1, 1e-16);
  EXPECT_NEAR(w_eval(p, 1.0, 4.0), 0.25 / 4.5, 1e-16);
  EXPECT_NEAR(1e8 * w_eval(p, 1.0, 1e8), 0.25, 1e-8);
  EXPECT_THROW(w_eval(p, 0.0, 1.0), DomainError);
  EXPECT_THROW(w_time_derivative(p, -1.0, 1.0), DomainError);
}

TEST(Barrier, MonotoneInSpaceAndTime) {
  const auto p = make_subsolution_params(pure(0.75), 1.0);
  for (double x = 0.1; x < 100.0; x *= 1.3) {
    EXPECT_LT(w_eval(p, 1.0, x * 1.3), w_eval(p, 1.0, x));
    EXPECT_GT(w_eval(p, 2.0, x), w_eval(p, 1.0, x));
  }
}

TEST(Barrier, TimeDerivativeMatchesDifferenceQuotient) {
  const auto p = make_subsolution_params(pure(0.5), 2.0);
  for (double x : {0.5, 3.0, 30.0}) {
    const double t = 2.0, h = 1e-5;
    const double fd = (w_eval(p, t + h, x) - w_eval(p, t - h, x)) / (2.0 * h);
    EXPECT_NEAR(w_time_derivative(p, t, x), fd, 1e-9);
    EXPECT_NEAR(w_time_derivative(p, 1e-300, x), p.kappa / x, 1e-15);
  }
  EXPECT_EQ(w_time_derivative(p, 1.0, -1.0), 0.0);
}

TEST(Residual, MatchesIndependentQuadrature) {
  const auto spec = pure(0.5);
  const auto p = make_subsolution_params(spec, 2.0);
  for (auto [t, x] : {std::pair{8.0, 30.0}, std::pair{1.0, 18.0}, std::pair{15.0, 200.0}}) {
    const double d = apply_continuum(spec, p, t, x, 1e-10);
    EXPECT_NEAR(d, oracle_apply(p, t, x), 1e-8 * std::abs(d)) << t << " " << x;
  }
}

TEST(Residual, NonpositiveAtReferenceSample) {
  const auto spec = pure(0.5);
  const auto p = make_subsolution_params(spec, 2.0);
  const double d = apply_continuum(spec, p, 8.0, 30.0, 1e-10);
  const double r = subsolution_residual(spec, p, 8.0, 30.0, 1e-10);
  EXPECT_DOUBLE_EQ(r, w_time_derivative(p, 8.0, 30.0) - d);
  EXPECT_LE(r, residual_budget(d, 1e-10));
  EXPECT_EQ(residual_budget(0.0, 1e-10), 1e-10);
  EXPECT_EQ(residual_budget(2.0, 1e-10), 2e-9);
}

TEST(Residual, OtherExponent) {
  const auto spec = pure(0.75);
  const auto p = make_subsolution_params(spec, 1.0);
  const double t = 0.5 * p.t_star, x = p.region_start() + 5.0;
  const double d = apply_continuum(spec, p, t, x, 1e-10);
  EXPECT_NEAR(d, oracle_apply(p, t, x), 1e-8 * std::abs(d));
}

TEST(Residual, TwentyByTwentyGrid) {
  const auto spec = pure(0.5);
  const auto p = make_subsolution_params(spec, 2.0);
  const auto grid = residual_grid(spec, p, 20, 20, p.region_start(), 200.0, 1e-10);
  ASSERT_EQ(grid.size(), 400u);
  EXPECT_EQ(grid.front().x, 18.0);
  EXPECT_EQ(grid.back().x, 200.0);
  EXPECT_GT(grid.front().t, 0.0);
  EXPECT_LT(grid.back().t, 16.0);
  for (const auto& r : grid) EXPECT_TRUE(r.pass) << r.t << " " << r.x << " " << r.residual;
  const auto j = to_json(grid.front());
  EXPECT_EQ(j.at("x").get<double>(), 18.0);
  EXPECT_THROW(residual_grid(spec, p, 0, 20, 18.0, 200.0, 1e-10), std::invalid_argument);
}

TEST(Barrier, ConvexOnFarRegion) {
  const auto p = make_subsolution_params(pure(0.5), 2.0);
  for (double t : {0.5, 8.0, 15.9}) EXPECT_GE(convexity_margin(p, t, 400.0, 60), 0.0);
}

TEST(Shifted, Values) {
  const auto p = make_subsolution_params(pure(0.5), 2.0, 1.0, 0.0);
  EXPECT_EQ(shifted_subsolution(p, 8.0, -18.0), 0.5);
  EXPECT_NEAR(shifted_subsolution(p, 8.0, 1000.0), 2.0 / 1022.0, 1e-16);
  EXPECT_NEAR(1e9 * shifted_subsolution(p, 8.0, 1e9), 2.0, 1e-6);
  const auto q = make_subsolution_params(pure(0.5), 2.0, 3.0, 5.0);
  EXPECT_EQ(shifted_subsolution(q, 8.0, -23.0), 1.5);
}
