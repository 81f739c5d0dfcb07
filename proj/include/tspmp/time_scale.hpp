#pragma once

#include <utility>
#include <vector>

#include "tspmp/errors.hpp"

namespace tspmp {

enum class RightClass { Dense, Scattered };
enum class LeftClass { Dense, Scattered };

struct PointClass {
  RightClass right;
  LeftClass left;
};

/// A bounded time scale stored canonically as a finite union of disjoint,
/// sorted closed intervals. Degenerate intervals are isolated points.
/// Values are immutable after construction; all queries are pure.
class TimeScale {
 public:
  struct Segment {
    double left;
    double right;
  };

  // Absolute tolerance used to absorb float noise at segment endpoints.
  static constexpr double kSnapTol = 1e-12;

  explicit TimeScale(const std::vector<std::pair<double, double>>& raw_segments);

  const std::vector<Segment>& segments() const { return segments_; }
  double min_time() const { return segments_.front().left; }
  double max_time() const { return segments_.back().right; }

  bool contains(double t) const;
  /// Snaps t onto the nearest segment bound within kSnapTol, else returns t.
  double snap(double t) const;

  /// Forward jump: inf{s in T | s > t}, with sigma(max T) = max T.
  double sigma(double t) const;
  /// Backward jump: sup{s in T | s < t}, with rho(min T) = min T.
  double rho(double t) const;
  /// Graininess sigma(t) - t.
  double graininess(double t) const;
  PointClass classify(double t) const;
  bool is_right_scattered(double t) const;

  /// Measure of [c,d) intersected with the scale; equals d - c.
  double delta_measure(double c, double d) const;
  /// Same measure computed from the decomposition into dense-part Lebesgue
  /// length plus graininess at right-scattered points.
  double delta_measure_decomposed(double c, double d) const;
  /// Measure of a finite union of closed real intervals intersected with the
  /// scale (the top point of the scale carries no mass).
  double delta_measure_of(const std::vector<std::pair<double, double>>& intervals) const;

  /// Right-scattered points r with c <= r < d, ascending.
  std::vector<double> right_scattered_points(double c, double d) const;

  /// Strictly increasing grid on [c,d]: contains c, d, every right-scattered
  /// point, both endpoints of every touched segment, and subdivides dense
  /// parts with step <= h.
  std::vector<double> sample_grid(double c, double d, double h) const;

 private:
  // Index of the segment containing t (after snapping), or -1.
  int segment_of(double t) const;

  std::vector<Segment> segments_;
};

TimeScale integer_scale(int lo, int hi);
/// Uniform lattice {a, a+step, ..., a+k*step <= b}.
TimeScale uniform_scale(double a, double b, double step);
/// Depth-k middle-thirds approximation of the Cantor set on [0,1].
TimeScale cantor_scale(int depth);

}  // namespace tspmp
