#include "nlflat/time_integration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlflat/errors.hpp"
#include "nlflat/simd.hpp"

namespace nlflat {

Trajectory::Trajectory(Field initial) {
  times_.push_back(initial.time());
  states_.push_back(std::move(initial));
}

void Trajectory::push(Field state) {
  if (!(state.time() > times_.back())) throw std::invalid_argument("trajectory: times must be strictly increasing");
  if (!state.same_grid(states_.front())) throw GridMismatch("trajectory: all states must share one grid");
  times_.push_back(state.time());
  states_.push_back(std::move(state));
}

bool Trajectory::has_time(double t) const { return std::find(times_.begin(), times_.end(), t) != times_.end(); }

const Field& Trajectory::at(double t) const {
  auto it = std::find(times_.begin(), times_.end(), t);
  if (it == times_.end()) {
    std::ostringstream os;
    os << "trajectory: no snapshot at t=" << t;
    throw std::out_of_range(os.str());
  }
  return states_[static_cast<std::size_t>(it - times_.begin())];
}

double stable_dt(const OperatorDiscretization& op, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("stable_dt: safety must lie in (0, 1]");
  const double w = row_sum_bound(op);
  if (!(w > 0.0)) throw StabilityError("stable_dt: degenerate kernel (row sum is zero)");
  return safety / w;
}

namespace {

void euler_update(const OperatorDiscretization& op, std::vector<double>& u, std::vector<double>& rate, double t,
                  double dt, ApplyMethod method) {
  op.apply_values(u, rate, method);
  for (std::size_t i = 0; i < rate.size(); ++i) {
    if (!std::isfinite(rate[i])) {
      std::ostringstream os;
      os.precision(17);
      os << "evolve: non-finite operator value at x=" << op.grid().point(i) << " (index " << i << ", t=" << t
         << ", u=" << u[i] << ")";
      throw DivergenceError(os.str());
    }
  }
  simd::axpy(dt, rate, u);
}

}  // namespace

Field step(const OperatorDiscretization& op, const Field& field, double dt, ApplyMethod method) {
  if (!(field.grid_ptr() == op.grid_ptr() || field.grid() == op.grid()))
    throw GridMismatch("step: field does not live on the operator's grid");
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (dt * row_sum_bound(op) > 1.0) {
    std::ostringstream os;
    os.precision(17);
    os << "step: dt=" << dt << " exceeds the monotonicity bound 1/W=" << 1.0 / row_sum_bound(op);
    throw StabilityError(os.str());
  }
  std::vector<double> u(field.values().begin(), field.values().end());
  std::vector<double> rate(u.size());
  euler_update(op, u, rate, field.time(), dt, method);
  return Field(op.grid_ptr(), field.time() + dt, std::move(u));
}

Trajectory evolve(const OperatorDiscretization& op, const Field& u0, double t_final,
                  std::span<const double> output_times, EvolveOptions options) {
  if (!(u0.grid_ptr() == op.grid_ptr() || u0.grid() == op.grid()))
    throw GridMismatch("evolve: initial datum does not live on the operator's grid");
  const double t0 = u0.time();
  if (!(t_final >= t0) || !std::isfinite(t_final)) throw std::invalid_argument("evolve: t_final must be >= u0 time");
  if (!std::is_sorted(output_times.begin(), output_times.end()))
    throw std::invalid_argument("evolve: output times must be sorted");
  std::vector<double> targets;
  for (double t : output_times) {
    if (!(t >= t0 && t <= t_final)) throw std::invalid_argument("evolve: output time outside [t0, t_final]");
    if (t > t0 && (targets.empty() || t > targets.back())) targets.push_back(t);
  }
  if (t_final > t0 && (targets.empty() || t_final > targets.back())) targets.push_back(t_final);

  Trajectory traj(u0);
  if (targets.empty()) return traj;

  const double dt_max = stable_dt(op, options.safety);
  std::vector<double> u(u0.values().begin(), u0.values().end());
  std::vector<double> rate(u.size());
  double t = t0;
  for (double target : targets) {
    while (t < target) {
      const double remaining = target - t;
      const bool land = remaining <= dt_max;
      const double dt = land ? remaining : dt_max;
      euler_update(op, u, rate, t, dt, options.method);
      t = land ? target : t + dt;
    }
    traj.push(Field(op.grid_ptr(), t, u));
  }
  return traj;
}

VerificationReport discrete_comparison_check(const Trajectory& upper, const Trajectory& lower, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("comparison: tol must be >= 0");
  if (upper.size() != lower.size() || !std::equal(upper.times().begin(), upper.times().end(), lower.times().begin()))
    throw GridMismatch("comparison: trajectories have different time stamps");
  if (!upper.front().same_grid(lower.front())) throw GridMismatch("comparison: trajectories live on different grids");

  VerificationReport r;
  r.check = "discrete_comparison";
  r.bound = -tol;
  r.tolerance = tol;
  r.measured = std::numeric_limits<double>::infinity();
  const auto& grid = upper.grid();
  for (std::size_t k = 0; k < upper.size(); ++k) {
    const auto& a = upper.states()[k];
    const auto& b = lower.states()[k];
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double margin = a[i] - b[i];
      if (margin < r.measured) {
        r.measured = margin;
        r.worst_t = a.time();
        r.worst_x = grid.point(i);
      }
    }
  }
  r.pass = r.measured >= -tol;
  r.metadata["snapshots"] = std::to_string(upper.size());
  r.metadata["grid_points"] = std::to_string(grid.size());
  return r;
}

}  // namespace nlflat
