#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "nlflat/errors.hpp"
#include "nlflat/time_integration.hpp"

using namespace nlflat;

namespace {

KernelSpec pure(double A, double s) { return KernelSpec(PureFractional{A}, s, {1.0, 1.0, 2.0}, "pure"); }

KernelSpec compact_example() {
  return KernelSpec(CompactPlusTail{NearProfile::bump, 1.0, 1.0}, 0.5, {1.25, 1.0, 2.0}, "compact");
}

std::vector<double> step_values(const Grid& g, double a, double b) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.point(i) <= b ? a : 0.0;
  return v;
}

}  // namespace

TEST(StableDt, SafetyOverRowSum) {
  // h = 0.1 with A = 1, s = 1/2: W = 4/h + c0 = 50 at the centre; scale A to get W = 40.
  auto grid = make_grid(-1000.0, 1000.0, 20001);
  DiscretizeOptions force;
  force.force = true;
  const auto probe = discretize(pure(1.0, 0.5), grid, {0.0, RightZero{}}, force);
  const double A = 40.0 / probe.row_sum();
  const auto op = discretize(pure(A, 0.5), grid, {0.0, RightZero{}}, force);
  EXPECT_NEAR(op.row_sum(), 40.0, 1e-9);
  EXPECT_NEAR(stable_dt(op, 0.9), 0.0225, 1e-12);
  EXPECT_NEAR(stable_dt(op, 1.0), 0.025, 1e-12);
  EXPECT_THROW(stable_dt(op, 0.0), std::invalid_argument);
  EXPECT_THROW(stable_dt(op, 1.5), std::invalid_argument);
}

TEST(StableDt, DegenerateKernelRejected) {
  DiscretizeOptions force;
  force.force = true;
  const auto op = discretize(pure(0.0, 0.5), make_grid(-1.0, 1.0, 33), {0.0, RightZero{}}, force);
  EXPECT_THROW(stable_dt(op, 0.9), StabilityError);
}

TEST(Step, RefusesUnstableDt) {
  auto grid = make_grid(-10.0, 10.0, 201);
  const auto op = discretize(pure(1.0, 0.5), grid, {1.0, RightZero{}});
  const Field u(grid, 0.0, step_values(*grid, 1.0, 0.0));
  EXPECT_THROW(step(op, u, 1.01 / op.row_sum()), StabilityError);
  EXPECT_THROW(step(op, u, 0.0), std::invalid_argument);
  const auto next = step(op, u, 1.0 / op.row_sum());
  EXPECT_DOUBLE_EQ(next.time(), 1.0 / op.row_sum());
}

TEST(Step, ConstantStateIsStationary) {
  auto grid = make_grid(-10.0, 10.0, 201);
  const auto op = discretize(compact_example(), grid, {0.7, RightConstant{0.7}});
  const Field u(grid, 0.0, std::vector<double>(201, 0.7));
  const auto traj = evolve(op, u, 0.5, {});
  for (double v : traj.back().values()) EXPECT_NEAR(v, 0.7, 1e-13);
}

TEST(Evolve, ZeroDurationReturnsInitialState) {
  auto grid = make_grid(-10.0, 10.0, 201);
  const auto op = discretize(pure(1.0, 0.5), grid, {1.0, RightZero{}});
  const Field u(grid, 0.0, step_values(*grid, 1.0, 0.0));
  const auto traj = evolve(op, u, 0.0, {});
  ASSERT_EQ(traj.size(), 1u);
  EXPECT_EQ(traj.front().time(), 0.0);
  for (std::size_t i = 0; i < 201; ++i) EXPECT_EQ(traj.front()[i], u[i]);
}

TEST(Evolve, LandsOnOutputTimes) {
  auto grid = make_grid(-10.0, 10.0, 201);
  const auto op = discretize(pure(1.0, 0.5), grid, {1.0, RightZero{}});
  const Field u(grid, 0.0, step_values(*grid, 1.0, 0.0));
  const std::vector<double> outs{0.0, 0.1, 0.1, 0.37};
  const auto traj = evolve(op, u, 0.5, outs);
  ASSERT_EQ(traj.size(), 4u);
  EXPECT_TRUE(traj.has_time(0.1));
  EXPECT_TRUE(traj.has_time(0.37));
  EXPECT_TRUE(traj.has_time(0.5));
  EXPECT_THROW(traj.at(0.2), std::out_of_range);
  const std::vector<double> bad{0.6};
  EXPECT_THROW(evolve(op, u, 0.5, bad), std::invalid_argument);
}

TEST(Evolve, SemigroupProperty) {
  auto grid = make_grid(-20.0, 20.0, 401);
  const auto op = discretize(pure(1.0, 0.5), grid, {1.0, RightZero{}});
  const Field u(grid, 0.0, step_values(*grid, 1.0, 0.0));
  const std::vector<double> mid{0.3};
  const auto whole = evolve(op, u, 0.8, mid);
  const auto first = evolve(op, u, 0.3, {});
  const auto second = evolve(op, first.back(), 0.8, {});
  for (std::size_t i = 0; i < 401; ++i) EXPECT_EQ(second.back()[i], whole.back()[i]);
}

TEST(Evolve, StaysWithinDataBounds) {
  auto grid = make_grid(-20.0, 20.0, 401);
  const auto op = discretize(compact_example(), grid, {1.0, RightZero{}});
  const Field u(grid, 0.0, step_values(*grid, 1.0, 0.0));
  const auto traj = evolve(op, u, 1.0, {}, {0.9, ApplyMethod::direct});
  for (double v : traj.back().values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Evolve, GridMismatchRejected) {
  const auto op = discretize(pure(1.0, 0.5), make_grid(-1.0, 1.0, 33), {0.0, RightZero{}});
  const Field u(make_grid(-1.0, 1.0, 35), 0.0, std::vector<double>(35, 0.0));
  EXPECT_THROW(evolve(op, u, 1.0, {}), GridMismatch);
  EXPECT_THROW(step(op, u, 1e-3), GridMismatch);
}

TEST(Comparison, OrderedDataStayOrdered) {
  auto grid = make_grid(-20.0, 20.0, 401);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (const auto& k : {pure(1.0, 0.5), pure(1.0, 0.25), compact_example()}) {
    const auto op = discretize(k, grid, {1.0, RightZero{}});
    std::vector<double> lo(401), hi(401);
    for (std::size_t i = 0; i < 401; ++i) {
      lo[i] = d(rng);
      hi[i] = lo[i] + d(rng);
    }
    const std::vector<double> outs{0.25, 0.5};
    const EvolveOptions opts{0.9, ApplyMethod::direct};
    const auto upper = evolve(op, Field(grid, 0.0, hi), 1.0, outs, opts);
    const auto lower = evolve(op, Field(grid, 0.0, lo), 1.0, outs, opts);
    const auto r = discrete_comparison_check(upper, lower, 1e-12);
    EXPECT_TRUE(r.pass) << k.id() << " margin " << r.measured;
    EXPECT_EQ(r.check, "discrete_comparison");
  }
}

TEST(Comparison, DetectsViolation) {
  auto grid = make_grid(-5.0, 5.0, 101);
  const auto op = discretize(pure(1.0, 0.5), grid, {0.0, RightZero{}});
  const auto upper = evolve(op, Field(grid, 0.0, std::vector<double>(101, 0.0)), 0.1, {});
  const auto lower = evolve(op, Field(grid, 0.0, std::vector<double>(101, 0.5)), 0.1, {});
  const auto r = discrete_comparison_check(upper, lower, 1e-12);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.measured, 0.0);
}

TEST(Comparison, TimeStampsMustAgree) {
  auto grid = make_grid(-5.0, 5.0, 101);
  const auto op = discretize(pure(1.0, 0.5), grid, {0.0, RightZero{}});
  const Field u(grid, 0.0, std::vector<double>(101, 0.0));
  const auto a = evolve(op, u, 0.1, {});
  const auto b = evolve(op, u, 0.2, {});
  EXPECT_THROW(discrete_comparison_check(a, b, 1e-12), GridMismatch);
}

TEST(Monotonicity, NonincreasingDataStayNonincreasing) {
  auto grid = make_grid(-20.0, 20.0, 401);
  const auto op = discretize(compact_example(), grid, {1.0, RightZero{}});
  std::vector<double> u(401);
  for (std::size_t i = 0; i < 401; ++i) u[i] = 0.5 * std::erfc(grid->point(i));
  const auto traj = evolve(op, Field(grid, 0.0, u), 1.0, {}, {0.9, ApplyMethod::direct});
  for (const auto& f : traj.states()) {
    for (std::size_t i = 0; i + 1 < f.size(); ++i) EXPECT_LE(f[i + 1] - f[i], 1e-12);
  }
}
