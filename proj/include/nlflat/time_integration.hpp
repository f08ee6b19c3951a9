#pragma once

#include <span>
#include <vector>

#include "nlflat/grid.hpp"
#include "nlflat/nonlocal_operator.hpp"
#include "nlflat/report.hpp"

namespace nlflat {

/// Snapshots u(t_k, .) at strictly increasing times, all on one grid.
class Trajectory {
 public:
  explicit Trajectory(Field initial);

  void push(Field state);

  const Grid& grid() const { return states_.front().grid(); }
  std::span<const double> times() const { return times_; }
  std::span<const Field> states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  const Field& front() const { return states_.front(); }
  const Field& back() const { return states_.back(); }

  /// Snapshot stamped exactly t; throws std::out_of_range otherwise.
  const Field& at(double t) const;
  bool has_time(double t) const;

 private:
  std::vector<double> times_;
  std::vector<Field> states_;
};

/// safety / row_sum_bound(op); the Euler update is a convex combination for any dt at or below it.
double stable_dt(const OperatorDiscretization& op, double safety);

/// field + dt * D_h[field]; refuses dt above the monotonicity bound.
Field step(const OperatorDiscretization& op, const Field& field, double dt,
           ApplyMethod method = ApplyMethod::direct);

struct EvolveOptions {
  double safety = 0.9;
  ApplyMethod method = ApplyMethod::automatic;
};

/// Explicit Euler from u0.time() to t_final. The step is shortened so every
/// requested output time (and t_final) is landed on exactly. The trajectory
/// holds u0 followed by one snapshot per distinct output time.
Trajectory evolve(const OperatorDiscretization& op, const Field& u0, double t_final,
                  std::span<const double> output_times, EvolveOptions options = {});

/// Checks upper(t, x) >= lower(t, x) - tol at every snapshot point. `measured`
/// is the worst margin min(upper - lower); the bound is -tol.
VerificationReport discrete_comparison_check(const Trajectory& upper, const Trajectory& lower, double tol);

}  // namespace nlflat
