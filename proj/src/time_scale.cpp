#include "tspmp/time_scale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tspmp {

const char* err_name(Err e) noexcept {
  switch (e) {
    case Err::EmptyScale: return "EmptyScale";
    case Err::SingletonScale: return "SingletonScale";
    case Err::NotInScale: return "NotInScale";
    case Err::ReversedInterval: return "ReversedInterval";
    case Err::NonPositiveStep: return "NonPositiveStep";
    case Err::GridMismatch: return "GridMismatch";
    case Err::NotOnGrid: return "NotOnGrid";
    case Err::AtScaleMax: return "AtScaleMax";
    case Err::NegativeRate: return "NegativeRate";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::NotInOmega: return "NotInOmega";
    case Err::UnsupportedKind: return "UnsupportedKind";
    case Err::NotInTarget: return "NotInTarget";
    case Err::BlowUp: return "BlowUp";
    case Err::ControlOutOfOmega: return "ControlOutOfOmega";
    case Err::NotRS: return "NotRS";
    case Err::NotRD: return "NotRD";
    case Err::AlphaNotInDenseSet: return "AlphaNotInDenseSet";
    case Err::BetaNotInV: return "BetaNotInV";
    case Err::MaximizationFailed: return "MaximizationFailed";
    case Err::TooLarge: return "TooLarge";
    case Err::NoAdmissibleControl: return "NoAdmissibleControl";
    case Err::NoConvergence: return "NoConvergence";
    case Err::DegenerateArgmax: return "DegenerateArgmax";
    case Err::StepTooLarge: return "StepTooLarge";
    case Err::NontrivialityViolation: return "NontrivialityViolation";
    case Err::NotApplicable: return "NotApplicable";
    case Err::ParseError: return "ParseError";
  }
  return "UnknownError";
}

TimeScale::TimeScale(const std::vector<std::pair<double, double>>& raw_segments) {
  if (raw_segments.empty()) fail(Err::EmptyScale, "no segments given");
  std::vector<Segment> segs;
  segs.reserve(raw_segments.size());
  for (const auto& [l, r] : raw_segments) {
    if (!(std::isfinite(l) && std::isfinite(r))) fail(Err::EmptyScale, "non-finite segment bound");
    if (r < l - kSnapTol) fail(Err::ReversedInterval, "segment with right < left");
    segs.push_back({l, std::max(l, r)});
  }
  std::sort(segs.begin(), segs.end(),
            [](const Segment& x, const Segment& y) { return x.left < y.left; });
  // Merge overlapping or touching segments.
  for (const Segment& s : segs) {
    if (!segments_.empty() && s.left <= segments_.back().right + kSnapTol) {
      segments_.back().right = std::max(segments_.back().right, s.right);
    } else {
      segments_.push_back(s);
    }
  }
  const bool single_point =
      segments_.size() == 1 && segments_[0].right - segments_[0].left <= kSnapTol;
  if (single_point) fail(Err::SingletonScale, "scale must contain at least two points");
}

int TimeScale::segment_of(double t) const {
  // First segment with right >= t - tol.
  auto it = std::lower_bound(segments_.begin(), segments_.end(), t - kSnapTol,
                             [](const Segment& s, double v) { return s.right < v; });
  if (it == segments_.end()) return -1;
  if (t < it->left - kSnapTol) return -1;
  return static_cast<int>(it - segments_.begin());
}

bool TimeScale::contains(double t) const { return segment_of(t) >= 0; }

double TimeScale::snap(double t) const {
  int i = segment_of(t);
  if (i < 0) return t;
  const Segment& s = segments_[static_cast<size_t>(i)];
  if (std::abs(t - s.left) <= kSnapTol) return s.left;
  if (std::abs(t - s.right) <= kSnapTol) return s.right;
  return t;
}

double TimeScale::sigma(double t) const {
  int i = segment_of(t);
  if (i < 0) fail(Err::NotInScale, "sigma at t = " + std::to_string(t));
  const Segment& s = segments_[static_cast<size_t>(i)];
  if (s.right - t > kSnapTol) return t;  // right-dense interior
  if (static_cast<size_t>(i) + 1 == segments_.size()) return s.right;  // sigma(max) = max
  return segments_[static_cast<size_t>(i) + 1].left;
}

double TimeScale::rho(double t) const {
  int i = segment_of(t);
  if (i < 0) fail(Err::NotInScale, "rho at t = " + std::to_string(t));
  const Segment& s = segments_[static_cast<size_t>(i)];
  if (t - s.left > kSnapTol) return t;  // left-dense interior
  if (i == 0) return s.left;            // rho(min) = min
  return segments_[static_cast<size_t>(i) - 1].right;
}

double TimeScale::graininess(double t) const {
  double st = sigma(t);
  double snapped = snap(t);
  return std::max(0.0, st - snapped);
}

PointClass TimeScale::classify(double t) const {
  int i = segment_of(t);
  if (i < 0) fail(Err::NotInScale, "classify at t = " + std::to_string(t));
  const Segment& s = segments_[static_cast<size_t>(i)];
  const bool at_right = std::abs(t - s.right) <= kSnapTol;
  const bool at_left = std::abs(t - s.left) <= kSnapTol;
  const bool last = static_cast<size_t>(i) + 1 == segments_.size();
  PointClass pc;
  pc.right = (at_right && !last) ? RightClass::Scattered : RightClass::Dense;
  pc.left = (at_left && i > 0) ? LeftClass::Scattered : LeftClass::Dense;
  return pc;
}

bool TimeScale::is_right_scattered(double t) const {
  return classify(t).right == RightClass::Scattered;
}

double TimeScale::delta_measure(double c, double d) const {
  if (!contains(c) || !contains(d)) fail(Err::NotInScale, "delta_measure endpoint not in scale");
  if (d < c - kSnapTol) fail(Err::ReversedInterval, "delta_measure with d < c");
  return std::max(0.0, snap(d) - snap(c));
}

double TimeScale::delta_measure_decomposed(double c, double d) const {
  if (!contains(c) || !contains(d)) fail(Err::NotInScale, "delta_measure endpoint not in scale");
  if (d < c - kSnapTol) fail(Err::ReversedInterval, "delta_measure with d < c");
  c = snap(c);
  d = snap(d);
  double total = 0.0;
  for (size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    double lo = std::max(s.left, c);
    double hi = std::min(s.right, d);
    if (hi > lo) total += hi - lo;
    // Right-scattered mass at the segment end, when it lies in [c,d).
    if (i + 1 < segments_.size() && s.right >= c - kSnapTol && s.right < d - kSnapTol) {
      total += segments_[i + 1].left - s.right;
    }
  }
  return total;
}

double TimeScale::delta_measure_of(
    const std::vector<std::pair<double, double>>& intervals) const {
  // Canonicalize the queried union first.
  std::vector<std::pair<double, double>> ivs = intervals;
  for (auto& [l, r] : ivs) {
    if (r < l) fail(Err::ReversedInterval, "measurable set interval reversed");
  }
  std::sort(ivs.begin(), ivs.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : ivs) {
    if (!merged.empty() && iv.first <= merged.back().second + kSnapTol) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }
  double total = 0.0;
  for (const auto& [l, r] : merged) {
    for (size_t i = 0; i < segments_.size(); ++i) {
      const Segment& s = segments_[i];
      double lo = std::max(s.left, l);
      double hi = std::min(s.right, r);
      if (hi > lo) total += hi - lo;
      if (i + 1 < segments_.size() && s.right >= l - kSnapTol && s.right <= r + kSnapTol) {
        total += segments_[i + 1].left - s.right;
      }
    }
  }
  return total;
}

std::vector<double> TimeScale::right_scattered_points(double c, double d) const {
  std::vector<double> out;
  for (size_t i = 0; i + 1 < segments_.size(); ++i) {
    double r = segments_[i].right;
    if (r >= c - kSnapTol && r < d - kSnapTol) out.push_back(r);
  }
  return out;
}

std::vector<double> TimeScale::sample_grid(double c, double d, double h) const {
  if (h <= 0.0) fail(Err::NonPositiveStep, "sample_grid needs h > 0");
  if (!contains(c) || !contains(d)) fail(Err::NotInScale, "sample_grid endpoint not in scale");
  c = snap(c);
  d = snap(d);
  if (d <= c + kSnapTol) fail(Err::ReversedInterval, "sample_grid needs c < d");
  std::vector<double> grid;
  for (const Segment& s : segments_) {
    double lo = std::max(s.left, c);
    double hi = std::min(s.right, d);
    if (hi < lo - kSnapTol) continue;
    if (hi - lo <= kSnapTol) {
      grid.push_back(lo);
      continue;
    }
    int n = static_cast<int>(std::ceil((hi - lo) / h - 1e-9));
    n = std::max(n, 1);
    for (int k = 0; k <= n; ++k) {
      grid.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n));
    }
  }
  std::sort(grid.begin(), grid.end());
  std::vector<double> out;
  for (double t : grid) {
    if (out.empty() || t > out.back() + kSnapTol) out.push_back(t);
  }
  return out;
}

TimeScale integer_scale(int lo, int hi) {
  std::vector<std::pair<double, double>> segs;
  for (int k = lo; k <= hi; ++k) segs.push_back({static_cast<double>(k), static_cast<double>(k)});
  return TimeScale(segs);
}

TimeScale uniform_scale(double a, double b, double step) {
  if (step <= 0.0) fail(Err::NonPositiveStep, "uniform_scale needs step > 0");
  std::vector<std::pair<double, double>> segs;
  int n = static_cast<int>(std::floor((b - a) / step + 1e-9));
  for (int k = 0; k <= n; ++k) {
    double t = a + step * k;
    segs.push_back({t, t});
  }
  return TimeScale(segs);
}

TimeScale cantor_scale(int depth) {
  std::vector<std::pair<double, double>> segs = {{0.0, 1.0}};
  for (int k = 0; k < depth; ++k) {
    std::vector<std::pair<double, double>> next;
    for (const auto& [l, r] : segs) {
      double w = (r - l) / 3.0;
      next.push_back({l, l + w});
      next.push_back({r - w, r});
    }
    segs = std::move(next);
  }
  return TimeScale(segs);
}

}  // namespace tspmp
