#include "nlflat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nlflat {

Grid::Grid(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n), h_(0.0) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
    throw std::invalid_argument("grid: need finite x_min < x_max");
  if (n < kMinPoints) throw std::invalid_argument("grid: need at least 16 points");
  h_ = (x_max - x_min) / static_cast<double>(n - 1);
  if (!(x_min + h_ > x_min)) throw std::invalid_argument("grid: spacing below floating-point resolution");
}

std::vector<double> Grid::points() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = point(i);
  return xs;
}

std::size_t Grid::floor_index(double x) const {
  if (x <= x_min_) return 0;
  if (x >= x_max_) return n_ - 1;
  auto i = static_cast<std::size_t>(std::floor((x - x_min_) / h_));
  i = std::min(i, n_ - 1);
  while (i > 0 && point(i) > x) --i;
  while (i + 1 < n_ && point(i + 1) <= x) ++i;
  return i;
}

Field::Field(GridPtr grid, double t, std::vector<double> values)
    : grid_(std::move(grid)), t_(t), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("field: null grid");
  if (values_.size() != grid_->size()) throw std::invalid_argument("field: value count does not match grid");
  if (!(t_ >= 0.0) || !std::isfinite(t_)) throw std::invalid_argument("field: time stamp must be finite and >= 0");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream os;
      os << "field: non-finite value at index " << i << " (t=" << t_ << ")";
      throw std::invalid_argument(os.str());
    }
  }
}

bool Field::same_grid(const Field& other) const { return grid_ == other.grid_ || *grid_ == *other.grid_; }

GridPtr make_grid(double x_min, double x_max, std::size_t n) { return std::make_shared<const Grid>(x_min, x_max, n); }

}  // namespace nlflat
