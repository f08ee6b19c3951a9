#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlflat {

/// Uniform mesh x_i = x_min + i h, i = 0..n-1, h = (x_max - x_min)/(n - 1).
class Grid {
 public:
  static constexpr std::size_t kMinPoints = 16;

  Grid(double x_min, double x_max, std::size_t n);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }

  double point(std::size_t i) const { return i + 1 == n_ ? x_max_ : x_min_ + static_cast<double>(i) * h_; }
  std::vector<double> points() const;

  /// Index of the largest grid point <= x (clamped to the grid).
  std::size_t floor_index(double x) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double h_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Time-stamped solution values on a grid.
class Field {
 public:
  Field(GridPtr grid, double t, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  double time() const { return t_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// True when both fields share a grid (same object or equal parameters).
  bool same_grid(const Field& other) const;

 private:
  GridPtr grid_;
  double t_;
  std::vector<double> values_;
};

GridPtr make_grid(double x_min, double x_max, std::size_t n);

}  // namespace nlflat
