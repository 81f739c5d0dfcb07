#include "tspmp/delta_calculus.hpp"

#include <cmath>
#include <string>

namespace tspmp {

namespace {

// True when the cell [grid[k], grid[k+1]] crosses a gap of the scale.
bool cell_is_jump(const TimeScale& ts, double t0, double t1) {
  if (!ts.is_right_scattered(t0)) return false;
  double st = ts.sigma(t0);
  if (std::abs(st - t1) > GridFunction::kGridTol) {
    fail(Err::GridMismatch, "grid skips sigma(" + std::to_string(t0) + ")");
  }
  return true;
}

}  // namespace

Eigen::VectorXd delta_integral(const TimeScale& ts, const GridFunction& f, double c, double d) {
  int ic = f.index_of(c);
  int id = f.index_of(d);
  if (ic < 0 || id < 0) fail(Err::GridMismatch, "integration bounds not on the grid");
  if (id < ic) fail(Err::ReversedInterval, "delta_integral with d < c");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.dim());
  for (int k = ic; k < id; ++k) {
    double t0 = f.grid[static_cast<size_t>(k)];
    double t1 = f.grid[static_cast<size_t>(k) + 1];
    if (cell_is_jump(ts, t0, t1)) {
      acc += (t1 - t0) * f.values.col(k);
    } else {
      acc += 0.5 * (t1 - t0) * (f.values.col(k) + f.values.col(k + 1));
    }
  }
  return acc;
}

Eigen::VectorXd delta_derivative(const TimeScale& ts, const GridFunction& f, double t) {
  int k = f.require_index(t);
  if (std::abs(t - ts.max_time()) <= TimeScale::kSnapTol) {
    fail(Err::AtScaleMax, "delta derivative undefined at max T");
  }
  if (k + 1 >= f.size()) fail(Err::NotOnGrid, "no grid point after t");
  double t1 = f.grid[static_cast<size_t>(k) + 1];
  if (ts.is_right_scattered(t)) {
    double mu = ts.graininess(t);
    if (std::abs(ts.sigma(t) - t1) > GridFunction::kGridTol) {
      fail(Err::GridMismatch, "grid skips sigma(t)");
    }
    return (f.values.col(k + 1) - f.values.col(k)) / mu;
  }
  // Right-dense: centered difference when both neighbors lie in the same
  // dense segment, one-sided otherwise.
  bool prev_ok = false;
  if (k > 0) {
    double tp = f.grid[static_cast<size_t>(k) - 1];
    prev_ok = !ts.is_right_scattered(tp);
  }
  if (prev_ok) {
    double tp = f.grid[static_cast<size_t>(k) - 1];
    return (f.values.col(k + 1) - f.values.col(k - 1)) / (t1 - tp);
  }
  return (f.values.col(k + 1) - f.values.col(k)) / (t1 - t);
}

double generalized_exp(const TimeScale& ts, double rate, double c, double t) {
  if (rate < 0.0) fail(Err::NegativeRate, "generalized_exp needs rate >= 0");
  if (!ts.contains(c) || !ts.contains(t)) fail(Err::NotInScale, "generalized_exp bound not in scale");
  if (t < c - TimeScale::kSnapTol) fail(Err::ReversedInterval, "generalized_exp with t < c");
  double dense_len = t - c;
  double product = 1.0;
  for (double r : ts.right_scattered_points(c, t)) {
    double mu = ts.graininess(r);
    dense_len -= mu;
    product *= 1.0 + rate * mu;
  }
  return std::exp(rate * std::max(0.0, dense_len)) * product;
}

GridFunction gronwall_envelope(const TimeScale& ts, double l1, double l2, double c, double d,
                               double h) {
  std::vector<double> grid = ts.sample_grid(c, d, h);
  return GridFunction::sampled_scalar(
      grid, [&](double t) { return l1 * generalized_exp(ts, l2, c, t); });
}

double leibniz_residual(const TimeScale& ts, const GridFunction& q, const GridFunction& q2,
                        double t, bool swap_sigma) {
  if (q.size() != q2.size() || q.dim() != q2.dim()) {
    fail(Err::GridMismatch, "leibniz_residual needs matching grids and dimensions");
  }
  GridFunction ip(q.grid, (q.values.array() * q2.values.array()).colwise().sum().matrix());
  double lhs = delta_derivative(ts, ip, t)[0];
  Eigen::VectorXd dq = delta_derivative(ts, q, t);
  Eigen::VectorXd dq2 = delta_derivative(ts, q2, t);
  double st = ts.sigma(t);
  double rhs = swap_sigma ? dq.dot(q2.at(t)) + q.at(st).dot(dq2)
                          : dq.dot(q2.at(st)) + q.at(t).dot(dq2);
  return std::abs(lhs - rhs);
}

}  // namespace tspmp
