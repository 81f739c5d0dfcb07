#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "tspmp/errors.hpp"

namespace tspmp {

/// A vector-valued signal sampled on a time-scale grid. Column k of `values`
/// is the value at grid[k].
struct GridFunction {
  static constexpr double kGridTol = 1e-9;

  std::vector<double> grid;
  Eigen::MatrixXd values;

  GridFunction() = default;
  GridFunction(std::vector<double> g, Eigen::MatrixXd v);

  int dim() const { return static_cast<int>(values.rows()); }
  int size() const { return static_cast<int>(grid.size()); }

  /// Index of t on the grid, or -1.
  int index_of(double t) const;
  /// Index of t on the grid; throws NotOnGrid when absent.
  int require_index(double t) const;

  Eigen::VectorXd at(double t) const;
  /// Piecewise-constant-left interpolant: value at the last grid point <= t.
  Eigen::VectorXd left_value(double t) const;

  static GridFunction constant(const std::vector<double>& grid, const Eigen::VectorXd& value);
  static GridFunction sampled(const std::vector<double>& grid,
                              const std::function<Eigen::VectorXd(double)>& fn);
  /// Scalar-valued convenience overload.
  static GridFunction sampled_scalar(const std::vector<double>& grid,
                                     const std::function<double(double)>& fn);

  /// Restriction to grid indices [first, last].
  GridFunction slice(int first, int last) const;
};

std::vector<double> merge_grids(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace tspmp
