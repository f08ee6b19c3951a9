#pragma once

#include <stdexcept>
#include <string>

namespace nlflat {

/// Argument outside the mathematical domain of an evaluation (e.g. J(0), w(t<=0, x)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A kernel fails one of the structural hypotheses (divergent near-field moment,
/// unverified kernel handed to the discretization).
class HypothesisViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field and operator (or two trajectories) live on different grids / time stamps.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested time step exceeds the monotonicity bound of the explicit scheme.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values appeared during time stepping.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlflat
