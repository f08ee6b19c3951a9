#include "nlflat/nonlocal_operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlflat/errors.hpp"
#include "nlflat/quadrature.hpp"
#include "nlflat/simd.hpp"

namespace nlflat {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_same_grid(const OperatorDiscretization& op, const Field& field) {
  if (!(field.grid_ptr() == op.grid_ptr() || field.grid() == op.grid()))
    throw GridMismatch("field does not live on the operator's grid");
}

}  // namespace

std::string describe(const BoundaryModel& b) {
  std::ostringstream os;
  os.precision(17);
  os << "left=constant(" << b.left << "), right=";
  std::visit(overloaded{
                 [&](const RightZero&) { os << "zero"; },
                 [&](const RightConstant& r) { os << "constant(" << r.value << ")"; },
                 [&](const RightAlgebraicTail&) { os << "algebraic_tail"; },
             },
             b.right);
  return os.str();
}

OperatorDiscretization::OperatorDiscretization(KernelSpec kernel, GridPtr grid, BoundaryModel boundary)
    : kernel_(std::move(kernel)), grid_(std::move(grid)), boundary_(std::move(boundary)) {}

OperatorDiscretization discretize(const KernelSpec& spec, GridPtr grid, BoundaryModel boundary,
                                  DiscretizeOptions options) {
  if (!grid) throw std::invalid_argument("discretize: null grid");
  OperatorDiscretization op(spec, grid, boundary);
  op.certificate_ = validate_hypothesis(spec, options.hypothesis_samples);
  if (!op.certificate_.verified && !options.force) {
    std::ostringstream os;
    os << "discretize: kernel " << spec.id() << " failed hypothesis validation (upper_margin="
       << op.certificate_.upper_margin << ", lower_margin=" << op.certificate_.lower_margin
       << ", near_moment=" << op.certificate_.near_moment << "); pass force to accept it anyway";
    throw HypothesisViolation(os.str());
  }
  if (!(boundary.left >= 0.0) || !std::isfinite(boundary.left))
    throw std::invalid_argument("discretize: left extension must be finite and >= 0");

  const std::size_t n = grid->size();
  const double h = grid->spacing();
  const double s = spec.s();

  op.near_coefficient_ = near_moment(spec, 0.5 * h) / (h * h);

  op.cell_weights_.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double kd = static_cast<double>(k);
    op.cell_weights_[k] = cell_integral(spec, (kd - 0.5) * h, (kd + 0.5) * h);
  }
  op.stencil_ = op.cell_weights_;
  op.stencil_[1] += 0.5 * op.near_coefficient_;

  op.mirrored_stencil_.assign(2 * n - 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    op.mirrored_stencil_[n - 1 + k] = op.stencil_[k];
    op.mirrored_stencil_[n - 1 - k] = op.stencil_[k];
  }

  // Exterior jump mass from x_i: int_{(i+1/2)h}^inf J on the left and
  // int_{(n-1-i+1/2)h}^inf J on the right. Radii come from indices so that a
  // grid symmetric about its centre gives exactly mirrored coefficients.
  std::vector<double> exterior(n);  // exterior[m] = int_{(m+1/2)h}^inf J
  if (spec.has_closed_form()) {
    for (std::size_t m = 0; m < n; ++m) exterior[m] = one_sided_tail(spec, (static_cast<double>(m) + 0.5) * h);
  } else {
    exterior[n - 1] = one_sided_tail(spec, (static_cast<double>(n - 1) + 0.5) * h);
    for (std::size_t m = n - 1; m-- > 0;) exterior[m] = exterior[m + 1] + op.cell_weights_[m + 1];
  }
  op.left_exterior_.resize(n);
  op.right_exterior_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    op.left_exterior_[i] = exterior[i];
    op.right_exterior_[i] = exterior[n - 1 - i];
  }
  op.left_exterior_[0] += 0.5 * op.near_coefficient_;
  op.right_exterior_[n - 1] += 0.5 * op.near_coefficient_;

  if (std::holds_alternative<RightAlgebraicTail>(boundary.right)) {
    if (!(grid->x_max() > 0.0)) throw std::invalid_argument("discretize: algebraic tail needs x_max > 0");
    const double x_lo = grid->x_max() / 10.0;
    std::size_t first = grid->floor_index(x_lo);
    if (grid->point(first) < x_lo) ++first;
    if (first + 2 > n) throw std::invalid_argument("discretize: algebraic tail needs >= 2 points in the last decade");
    op.tail_fit_begin_ = first;
    op.tail_fit_norm_ = 0.0;
    for (std::size_t j = first; j < n; ++j) op.tail_fit_norm_ += std::pow(grid->point(j), -4.0 * s);

    op.right_tail_profile_.resize(n);
    const double x_max = grid->x_max();
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = grid->point(i);
      const double r = (static_cast<double>(n - 1 - i) + 0.5) * h;
      auto f = [&](double z) { return std::pow(xi + z, -2.0 * s) * eval_kernel(spec, z); };
      double start = r;
      double value = 0.0;
      for (double bp : spec.breakpoints()) {
        if (bp > start) {
          value += quad::integrate(f, start, bp, 1e-12).value;
          start = bp;
        }
      }
      value += quad::integrate_tail(f, start, 1e-12).value;
      op.right_tail_profile_[i] = value;
    }
    op.right_tail_profile_[n - 1] += 0.5 * op.near_coefficient_ * std::pow(x_max + h, -2.0 * s);
  }

  std::vector<double> prefix(n, 0.0);  // prefix[m] = sum_{k=1}^{m} g_k
  for (std::size_t k = 1; k < n; ++k) prefix[k] = prefix[k - 1] + op.stencil_[k];
  op.diagonal_.resize(n);
  op.row_sum_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    op.diagonal_[i] = prefix[i] + prefix[n - 1 - i] + op.left_exterior_[i] + op.right_exterior_[i];
    op.row_sum_ = std::max(op.row_sum_, op.diagonal_[i]);
  }

  op.fft_ = std::make_shared<const FftConvolver>(op.stencil_);
  return op;
}

double OperatorDiscretization::fitted_tail_amplitude(std::span<const double> u) const {
  if (!std::holds_alternative<RightAlgebraicTail>(boundary_.right)) return 0.0;
  const double s = kernel_.s();
  double num = 0.0;
  for (std::size_t j = tail_fit_begin_; j < u.size(); ++j) num += u[j] * std::pow(grid_->point(j), -2.0 * s);
  return num / tail_fit_norm_;
}

void OperatorDiscretization::boundary_terms(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = grid_->size();
  const double left = boundary_.left;
  for (std::size_t i = 0; i < n; ++i) out[i] = left_exterior_[i] * left;
  std::visit(overloaded{
                 [&](const RightZero&) {},
                 [&](const RightConstant& r) {
                   for (std::size_t i = 0; i < n; ++i) out[i] += right_exterior_[i] * r.value;
                 },
                 [&](const RightAlgebraicTail&) {
                   const double amp = fitted_tail_amplitude(u);
                   for (std::size_t i = 0; i < n; ++i) out[i] += right_tail_profile_[i] * amp;
                 },
             },
             boundary_.right);
}

void OperatorDiscretization::apply_direct(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = grid_->size();
  const std::span<const double> mirrored(mirrored_stencil_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    // row i of the Toeplitz matrix is g_{|j-i|}, j = 0..n-1
    out[i] += simd::dot(mirrored.subspan(n - 1 - i, n), u) - diagonal_[i] * u[i];
  }
}

void OperatorDiscretization::apply_fft(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = grid_->size();
  std::vector<double> conv(n);
  fft_->convolve(u, conv);
  for (std::size_t i = 0; i < n; ++i) out[i] += conv[i] - diagonal_[i] * u[i];
}

void OperatorDiscretization::apply_values(std::span<const double> u, std::span<double> out,
                                          ApplyMethod method) const {
  const std::size_t n = grid_->size();
  if (u.size() != n || out.size() != n) throw GridMismatch("apply: value count does not match the grid");
  boundary_terms(u, out);
  if (method == ApplyMethod::automatic) method = n >= kFftThreshold ? ApplyMethod::fft : ApplyMethod::direct;
  if (method == ApplyMethod::fft)
    apply_fft(u, out);
  else
    apply_direct(u, out);
}

Field apply(const OperatorDiscretization& op, const Field& field) {
  require_same_grid(op, field);
  std::vector<double> out(field.size());
  op.apply_values(field.values(), out, ApplyMethod::direct);
  return Field(op.grid_ptr(), field.time(), std::move(out));
}

Field apply_fft(const OperatorDiscretization& op, const Field& field) {
  require_same_grid(op, field);
  std::vector<double> out(field.size());
  op.apply_values(field.values(), out, ApplyMethod::fft);
  return Field(op.grid_ptr(), field.time(), std::move(out));
}

double row_sum_bound(const OperatorDiscretization& op) { return op.row_sum(); }

}  // namespace nlflat
