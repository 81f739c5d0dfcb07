#include "tspmp/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tspmp {

GridFunction::GridFunction(std::vector<double> g, Eigen::MatrixXd v)
    : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<int>(grid.size()) != values.cols()) {
    fail(Err::DimensionMismatch, "grid length does not match value columns");
  }
}

int GridFunction::index_of(double t) const {
  auto it = std::lower_bound(grid.begin(), grid.end(), t - kGridTol);
  if (it == grid.end()) return -1;
  if (std::abs(*it - t) > kGridTol) return -1;
  return static_cast<int>(it - grid.begin());
}

int GridFunction::require_index(double t) const {
  int i = index_of(t);
  if (i < 0) fail(Err::NotOnGrid, "t = " + std::to_string(t) + " is not a grid point");
  return i;
}

Eigen::VectorXd GridFunction::at(double t) const { return values.col(require_index(t)); }

Eigen::VectorXd GridFunction::left_value(double t) const {
  auto it = std::upper_bound(grid.begin(), grid.end(), t + kGridTol);
  if (it == grid.begin()) fail(Err::NotOnGrid, "t before first grid point");
  return values.col(static_cast<int>(it - grid.begin()) - 1);
}

GridFunction GridFunction::constant(const std::vector<double>& grid,
                                    const Eigen::VectorXd& value) {
  Eigen::MatrixXd v(value.size(), static_cast<int>(grid.size()));
  v.colwise() = value;
  return GridFunction(grid, v);
}

GridFunction GridFunction::sampled(const std::vector<double>& grid,
                                   const std::function<Eigen::VectorXd(double)>& fn) {
  if (grid.empty()) fail(Err::GridMismatch, "empty grid");
  Eigen::VectorXd first = fn(grid[0]);
  Eigen::MatrixXd v(first.size(), static_cast<int>(grid.size()));
  v.col(0) = first;
  for (size_t k = 1; k < grid.size(); ++k) v.col(static_cast<int>(k)) = fn(grid[k]);
  return GridFunction(grid, v);
}

GridFunction GridFunction::sampled_scalar(const std::vector<double>& grid,
                                          const std::function<double(double)>& fn) {
  return sampled(grid, [&fn](double t) {
    Eigen::VectorXd v(1);
    v[0] = fn(t);
    return v;
  });
}

GridFunction GridFunction::slice(int first, int last) const {
  if (first < 0 || last >= size() || first > last) fail(Err::GridMismatch, "bad slice range");
  std::vector<double> g(grid.begin() + first, grid.begin() + last + 1);
  return GridFunction(g, values.middleCols(first, last - first + 1));
}

std::vector<double> merge_grids(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all;
  all.reserve(a.size() + b.size());
  all.insert(all.end(), a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double t : all) {
    if (out.empty() || t > out.back() + GridFunction::kGridTol) out.push_back(t);
  }
  return out;
}

}  // namespace tspmp
