#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nlflat/fft_convolver.hpp"
#include "nlflat/grid.hpp"
#include "nlflat/kernel.hpp"

namespace nlflat {

/// u(x) = 0 for x > x_max.
struct RightZero {};
/// u(x) = value for x > x_max.
struct RightConstant {
  double value = 0.0;
};
/// u(x) = A x^{-2s} for x > x_max, A fitted (least squares, exponent fixed)
/// on the grid points of the last decade [x_max/10, x_max].
struct RightAlgebraicTail {};

using RightBoundary = std::variant<RightZero, RightConstant, RightAlgebraicTail>;

/// Extension of the field outside [x_min, x_max]. The left side is always a
/// constant plateau value.
struct BoundaryModel {
  double left = 0.0;
  RightBoundary right = RightZero{};
};

std::string describe(const BoundaryModel& b);

enum class ApplyMethod {
  direct,     // SIMD dot product per output point, O(n^2)
  fft,        // zero-padded FFT convolution, O(n log n)
  automatic,  // fft for n >= kFftThreshold
};

inline constexpr std::size_t kFftThreshold = 4096;

struct DiscretizeOptions {
  /// Accept a kernel whose hypothesis certificate fails.
  bool force = false;
  std::size_t hypothesis_samples = 1000;
};

/// Precomputed weights of the discrete operator
///
///   D_h[u]_i = sum_{j != i} g_{|i-j|} u_j - diag_i u_i + boundary_i(u),
///
/// where g_k = w_k = int_{(k-1/2)h}^{(k+1/2)h} J for k >= 2 and
/// g_1 = w_1 + c0/2 carries the second-difference surrogate of the
/// innermost cell, c0 = h^{-2} int_{|z|<=h/2} z^2 J. Jumps leaving the grid
/// are folded into per-point exterior coefficients fed by the boundary model.
/// Immutable once built.
class OperatorDiscretization {
 public:
  const KernelSpec& kernel() const { return kernel_; }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const BoundaryModel& boundary() const { return boundary_; }
  const HypothesisCertificate& certificate() const { return certificate_; }

  /// w_k for k = 0..n-1 (w_0 = 0, the inner cell is not a jump weight).
  std::span<const double> cell_weights() const { return cell_weights_; }
  double near_coefficient() const { return near_coefficient_; }
  /// g_k for k = 0..n-1.
  std::span<const double> stencil() const { return stencil_; }
  /// Mass of jumps from x_i to the left exterior (including the inner-cell neighbour at i = 0).
  std::span<const double> left_exterior() const { return left_exterior_; }
  std::span<const double> right_exterior() const { return right_exterior_; }
  /// Coefficient of -u_i.
  std::span<const double> diagonal() const { return diagonal_; }
  double row_sum() const { return row_sum_; }

  /// Boundary contribution at each point for field values u.
  void boundary_terms(std::span<const double> u, std::span<double> out) const;

  /// Fitted amplitude of the algebraic right tail (0 for other models).
  double fitted_tail_amplitude(std::span<const double> u) const;

  /// out = D_h[u].
  void apply_values(std::span<const double> u, std::span<double> out, ApplyMethod method) const;

 private:
  friend OperatorDiscretization discretize(const KernelSpec&, GridPtr, BoundaryModel, DiscretizeOptions);
  OperatorDiscretization(KernelSpec kernel, GridPtr grid, BoundaryModel boundary);

  void apply_direct(std::span<const double> u, std::span<double> out) const;
  void apply_fft(std::span<const double> u, std::span<double> out) const;

  KernelSpec kernel_;
  GridPtr grid_;
  BoundaryModel boundary_;
  HypothesisCertificate certificate_;
  std::vector<double> cell_weights_;
  double near_coefficient_ = 0.0;
  std::vector<double> stencil_;
  std::vector<double> mirrored_stencil_;  // g_{|k|}, k = -(n-1)..(n-1)
  std::vector<double> left_exterior_;
  std::vector<double> right_exterior_;
  std::vector<double> right_tail_profile_;  // int (x_i + z)^{-2s} J(z) dz over the right exterior
  std::size_t tail_fit_begin_ = 0;          // first index of the last decade
  double tail_fit_norm_ = 0.0;              // sum over the decade of x^{-4s}
  std::vector<double> diagonal_;
  double row_sum_ = 0.0;
  std::shared_ptr<const FftConvolver> fft_;
};

/// Builds the discrete operator. Refuses kernels whose hypothesis certificate
/// fails unless options.force is set; a divergent near-field moment is always an error.
OperatorDiscretization discretize(const KernelSpec& spec, GridPtr grid, BoundaryModel boundary,
                                  DiscretizeOptions options = {});

Field apply(const OperatorDiscretization& op, const Field& field);
Field apply_fft(const OperatorDiscretization& op, const Field& field);

/// Total coefficient multiplying -u_i (maximum over i); the explicit
/// scheme is monotone for dt <= 1 / row_sum_bound.
double row_sum_bound(const OperatorDiscretization& op);

}  // namespace nlflat
