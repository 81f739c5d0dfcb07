#include "tspmp/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace tspmp {

namespace {

constexpr double kEq = 1e-12;  // exact-comparison slack for boundary tests

bool near(double a, double b, double tol = kEq) { return std::abs(a - b) <= tol; }

bool same_point(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol = kEq) {
  return (a - b).lpNorm<Eigen::Infinity>() <= tol;
}

Eigen::VectorXd unit(int m, int i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
  e[i] = 1.0;
  return e;
}

Eigen::Vector2d rot90(const Eigen::Vector2d& v) { return Eigen::Vector2d(-v.y(), v.x()); }

void check_dim(const ConstraintSet& s, const Eigen::VectorXd& v) {
  if (v.size() != s.dim()) fail(Err::DimensionMismatch, "vector dimension does not match set");
}

void require_member(const ConstraintSet& s, const Eigen::VectorXd& v) {
  check_dim(s, v);
  if (!s.member(v, kEq)) fail(Err::NotInOmega, "base point is not a member of the set");
}

// The fan line index of a point with v2 > 0, or -1.
int fan_level(const ConstraintSet& s, double x, double y, double tol = kEq) {
  double scale = 1.0;  // 2^-k
  for (int k = 0; k <= s.max_level; ++k, scale *= 0.5) {
    if (near(y, (1.0 - x) * scale, tol)) return k;
  }
  return -1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cone

bool Cone::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != vertex.size()) fail(Err::DimensionMismatch, "cone membership dimension");
  Eigen::VectorXd d = x - vertex;
  // Remove the lineality component.
  std::vector<Eigen::VectorXd> basis;
  for (const auto& l : lineality) {
    Eigen::VectorXd w = l;
    for (const auto& b : basis) w -= b.dot(w) * b;
    if (w.norm() > 1e-12) basis.push_back(w.normalized());
  }
  auto deflate = [&](Eigen::VectorXd v) {
    for (const auto& b : basis) v -= b.dot(v) * b;
    return v;
  };
  d = deflate(d);
  double dn = d.norm();
  if (dn <= tol) return true;
  std::vector<Eigen::VectorXd> gens;
  for (const auto& g : generators) {
    Eigen::VectorXd gg = deflate(g);
    if (gg.norm() > 1e-12) gens.push_back(gg);
  }
  if (gens.empty()) return false;
  // Nonnegative combination test by active-subset enumeration (few rays).
  int n = static_cast<int>(gens.size());
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) idx.push_back(i);
    }
    Eigen::MatrixXd G(vertex.size(), static_cast<int>(idx.size()));
    for (size_t c = 0; c < idx.size(); ++c) G.col(static_cast<int>(c)) = gens[idx[c]];
    Eigen::VectorXd coef = G.colPivHouseholderQr().solve(d);
    if ((G * coef - d).norm() > tol * (1.0 + dn)) continue;
    if ((coef.array() >= -tol * (1.0 + dn)).all()) return true;
  }
  return false;
}

bool cone_equal(const Cone& a, const Cone& b, double tol) {
  if (!same_point(a.vertex, b.vertex, tol)) return false;
  auto covered = [tol](const Cone& outer, const Cone& inner) {
    for (const auto& g : inner.generators) {
      if (!outer.contains(inner.vertex + g, tol)) return false;
    }
    for (const auto& l : inner.lineality) {
      if (!outer.contains(inner.vertex + l, tol)) return false;
      if (!outer.contains(inner.vertex - l, tol)) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

// ---------------------------------------------------------------------------
// ConstraintSet construction

ConstraintSet ConstraintSet::full_space(int m) { return ConstraintSet(OmegaKind::FullSpace, m); }

ConstraintSet ConstraintSet::singleton(const Eigen::VectorXd& v) {
  ConstraintSet s(OmegaKind::Singleton, static_cast<int>(v.size()));
  s.point = v;
  return s;
}

ConstraintSet ConstraintSet::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size()) fail(Err::DimensionMismatch, "box bounds");
  if ((hi - lo).minCoeff() < 0) fail(Err::ReversedInterval, "box with hi < lo");
  ConstraintSet s(OmegaKind::Box, static_cast<int>(lo.size()));
  s.lo = lo;
  s.hi = hi;
  return s;
}

ConstraintSet ConstraintSet::ball(const Eigen::VectorXd& center, double radius) {
  if (radius < 0) fail(Err::ReversedInterval, "ball with negative radius");
  ConstraintSet s(OmegaKind::Ball, static_cast<int>(center.size()));
  s.center = center;
  s.radius = radius;
  return s;
}

ConstraintSet ConstraintSet::halfspaces(const Eigen::MatrixXd& normals,
                                        const Eigen::VectorXd& offsets) {
  if (normals.rows() != offsets.size()) fail(Err::DimensionMismatch, "halfspace rows");
  ConstraintSet s(OmegaKind::Halfspaces, static_cast<int>(normals.cols()));
  s.normals = normals;
  s.offsets = offsets;
  return s;
}

ConstraintSet ConstraintSet::finite_set(const std::vector<Eigen::VectorXd>& pts) {
  if (pts.empty()) fail(Err::EmptyScale, "finite set needs at least one point");
  ConstraintSet s(OmegaKind::FiniteSet, static_cast<int>(pts.front().size()));
  s.points = pts;
  return s;
}

ConstraintSet ConstraintSet::abs_cone() { return ConstraintSet(OmegaKind::AbsCone, 2); }

ConstraintSet ConstraintSet::parabola_hypograph() {
  return ConstraintSet(OmegaKind::ParabolaHypograph, 2);
}

ConstraintSet ConstraintSet::quarter_disc() { return ConstraintSet(OmegaKind::QuarterDisc, 2); }

ConstraintSet ConstraintSet::line_fan(int max_level) {
  ConstraintSet s(OmegaKind::LineFan, 2);
  s.max_level = max_level;
  return s;
}

// ---------------------------------------------------------------------------
// Membership

bool ConstraintSet::member(const Eigen::VectorXd& v, double tol) const {
  check_dim(*this, v);
  switch (kind_) {
    case OmegaKind::FullSpace:
      return true;
    case OmegaKind::Singleton:
      return same_point(v, point, tol + kEq);
    case OmegaKind::Box:
      return (v.array() >= lo.array() - tol).all() && (v.array() <= hi.array() + tol).all();
    case OmegaKind::Ball:
      return (v - center).norm() <= radius + tol;
    case OmegaKind::Halfspaces:
      return ((normals * v - offsets).array() <= tol).all();
    case OmegaKind::FiniteSet:
      for (const auto& p : points) {
        if (same_point(v, p, tol + kEq)) return true;
      }
      return false;
    case OmegaKind::AbsCone:
      return v[1] <= std::abs(v[0]) + tol;
    case OmegaKind::ParabolaHypograph:
      return v[1] <= v[0] * v[0] + tol;
    case OmegaKind::QuarterDisc:
      return v[0] >= -tol && v[1] >= -tol && v.norm() <= 1.0 + tol;
    case OmegaKind::LineFan: {
      double x = v[0], y = v[1];
      if (x < -tol || x > 1.0 + tol) return false;
      if (std::abs(y) <= tol && y >= -tol) return true;  // base segment
      if (y < -tol) return false;
      return fan_level(*this, x, y, tol + kEq) >= 0;
    }
  }
  return false;
}

Eigen::VectorXd ConstraintSet::project(const Eigen::VectorXd& v) const {
  check_dim(*this, v);
  switch (kind_) {
    case OmegaKind::FullSpace:
      return v;
    case OmegaKind::Singleton:
      return point;
    case OmegaKind::Box:
      return v.cwiseMax(lo).cwiseMin(hi);
    case OmegaKind::Ball: {
      Eigen::VectorXd d = v - center;
      double n = d.norm();
      if (n <= radius) return v;
      return center + d * (radius / n);
    }
    case OmegaKind::FiniteSet: {
      double best = std::numeric_limits<double>::infinity();
      Eigen::VectorXd arg = points.front();
      for (const auto& p : points) {
        double dn = (v - p).norm();
        if (dn < best) {
          best = dn;
          arg = p;
        }
      }
      return arg;
    }
    default:
      fail(Err::UnsupportedKind, "projection not available for this set kind");
  }
}

// ---------------------------------------------------------------------------
// Direction predicates

std::vector<bool> alpha_set_probe(const ConstraintSet& omega, const Eigen::VectorXd& v,
                                  const Eigen::VectorXd& v2, const std::vector<double>& alphas) {
  require_member(omega, v);
  std::vector<bool> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back(omega.member(v + a * (v2 - v), kEq));
  return out;
}

bool is_dense_direction(const ConstraintSet& omega, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& v2) {
  require_member(omega, v);
  Eigen::VectorXd d = v2 - v;
  switch (omega.kind()) {
    case OmegaKind::FullSpace:
      return true;
    case OmegaKind::Singleton:
    case OmegaKind::FiniteSet:
      return same_point(v2, v);
    case OmegaKind::Box: {
      for (int i = 0; i < omega.dim(); ++i) {
        if (near(omega.lo[i], omega.hi[i])) {
          if (!near(d[i], 0.0)) return false;
        } else if (near(v[i], omega.lo[i])) {
          if (d[i] < -kEq) return false;
        } else if (near(v[i], omega.hi[i])) {
          if (d[i] > kEq) return false;
        }
      }
      return true;
    }
    case OmegaKind::Halfspaces: {
      for (int k = 0; k < omega.normals.rows(); ++k) {
        if (near(omega.normals.row(k) * v, omega.offsets[k], 1e-10)) {
          if (omega.normals.row(k) * d > kEq) return false;
        }
      }
      return true;
    }
    case OmegaKind::Ball: {
      Eigen::VectorXd n = v - omega.center;
      if (n.norm() < omega.radius - kEq) return true;
      return same_point(v2, v) || n.dot(d) < -kEq;
    }
    case OmegaKind::QuarterDisc: {
      double x = v[0], y = v[1];
      bool on_axis_x = near(x, 0.0);
      bool on_axis_y = near(y, 0.0);
      bool on_circle = near(v.norm(), 1.0);
      if (on_axis_x && d[0] < -kEq) return false;
      if (on_axis_y && d[1] < -kEq) return false;
      if (on_circle && !same_point(v2, v) && v.dot(d) >= -kEq) return false;
      return true;
    }
    case OmegaKind::AbsCone: {
      double x = v[0], y = v[1];
      if (y < std::abs(x) - kEq) return true;  // interior
      if (near(x, 0.0) && near(y, 0.0)) return omega.member(v2, kEq);  // fan vertex: cone is scale-invariant
      if (x > 0) return d[1] <= d[0] + kEq;
      return d[1] <= -d[0] + kEq;
    }
    case OmegaKind::ParabolaHypograph: {
      double x0 = v[0];
      if (v[1] < x0 * x0 - kEq) return true;  // interior
      // Hypograph of the tangent line at (x0, x0^2).
      return v2[1] <= x0 * (2.0 * v2[0] - x0) + kEq;
    }
    case OmegaKind::LineFan: {
      double x = v[0], y = v[1];
      if (y > kEq) {
        int k = fan_level(omega, x, y);
        double slope = -std::ldexp(1.0, -k);  // -2^-k
        bool on_line = near(d[0] * slope, d[1], 1e-10 * (1.0 + d.norm()));
        if (near(x, 0.0)) return on_line && d[0] >= -kEq;
        return on_line;
      }
      if (near(x, 1.0)) {
        // Apex: the left halves of every fan line plus the base.
        if (v2[0] > 1.0 + kEq) return false;
        if (near(v2[1], 0.0)) return true;
        if (v2[1] < 0.0) return false;
        return fan_level(omega, v2[0], v2[1]) >= 0;
      }
      if (near(x, 0.0)) return d[0] >= -kEq && d[1] >= -kEq;
      return d[1] >= -kEq;
    }
  }
  return false;
}

bool is_stable_dense_direction(const ConstraintSet& omega, const Eigen::VectorXd& v,
                               const Eigen::VectorXd& v2) {
  require_member(omega, v);
  Eigen::VectorXd d = v2 - v;
  switch (omega.kind()) {
    case OmegaKind::FullSpace:
      return true;
    case OmegaKind::Singleton:
    case OmegaKind::FiniteSet:
      return same_point(v2, v);
    case OmegaKind::Box:
      return is_dense_direction(omega, v, v2);
    case OmegaKind::Halfspaces: {
      // Stability at an active face asks the inequality of the face itself.
      for (int k = 0; k < omega.normals.rows(); ++k) {
        if (near(omega.normals.row(k) * v, omega.offsets[k], 1e-10)) {
          if (omega.normals.row(k) * v2 > omega.offsets[k] + kEq) return false;
        }
      }
      return true;
    }
    case OmegaKind::Ball: {
      Eigen::VectorXd n = v - omega.center;
      if (n.norm() < omega.radius - kEq) return true;
      return same_point(v2, v) || n.dot(d) < -kEq;
    }
    case OmegaKind::QuarterDisc: {
      double x = v[0], y = v[1];
      bool on_circle = near(v.norm(), 1.0);
      bool inside_circle = v.norm() < 1.0 - kEq;
      if (near(x, 0.0) && near(y, 0.0)) return v2[0] >= -kEq && v2[1] >= -kEq;
      if (near(x, 0.0) && inside_circle) return v2[0] >= -kEq;
      if (near(y, 0.0) && inside_circle) return v2[1] >= -kEq;
      if (on_circle && near(x, 0.0)) return same_point(v2, v) || (v2[0] >= -kEq && v2[1] < 1.0 - kEq);
      if (on_circle && near(y, 0.0)) return same_point(v2, v) || (v2[1] >= -kEq && v2[0] < 1.0 - kEq);
      if (on_circle) return same_point(v2, v) || v.dot(v2) < 1.0 - kEq;  // strict tangent hypograph
      return true;  // interior
    }
    case OmegaKind::AbsCone: {
      double x = v[0], y = v[1];
      if (y < std::abs(x) - kEq) return true;
      if (near(x, 0.0) && near(y, 0.0)) return v2[1] <= -std::abs(v2[0]) + kEq;
      if (x > 0) return d[1] <= d[0] + kEq;
      return d[1] <= -d[0] + kEq;
    }
    case OmegaKind::ParabolaHypograph: {
      double x0 = v[0];
      if (v[1] < x0 * x0 - kEq) return true;
      // Strict hypograph of the tangent; the base point itself is excluded.
      return v2[1] < x0 * (2.0 * v2[0] - x0) - kEq;
    }
    case OmegaKind::LineFan: {
      double x = v[0], y = v[1];
      Eigen::VectorXd apex(2);
      apex << 1.0, 0.0;
      if (y > kEq) {
        int k = fan_level(omega, x, y);
        double slope = -std::ldexp(1.0, -k);
        bool on_line = near(d[0] * slope, d[1], 1e-10 * (1.0 + d.norm()));
        if (near(x, 0.0)) return on_line && d[0] >= -kEq;
        return on_line;
      }
      // On the base segment every neighborhood meets infinitely many fan
      // lines, and the only direction dense from all of them is the apex.
      return same_point(v2, apex);
    }
  }
  return false;
}

Cone stable_cone(const ConstraintSet& omega, const Eigen::VectorXd& v) {
  require_member(omega, v);
  const int m = omega.dim();
  Cone cone;
  cone.vertex = v;
  auto full = [&]() {
    for (int i = 0; i < m; ++i) cone.lineality.push_back(unit(m, i));
  };
  switch (omega.kind()) {
    case OmegaKind::FullSpace:
      full();
      return cone;
    case OmegaKind::Singleton:
    case OmegaKind::FiniteSet:
      return cone;  // point cone
    case OmegaKind::Box: {
      for (int i = 0; i < m; ++i) {
        if (near(omega.lo[i], omega.hi[i])) continue;  // pinned coordinate
        if (near(v[i], omega.lo[i])) {
          cone.generators.push_back(unit(m, i));
        } else if (near(v[i], omega.hi[i])) {
          cone.generators.push_back(-unit(m, i));
        } else {
          cone.lineality.push_back(unit(m, i));
        }
      }
      return cone;
    }
    case OmegaKind::Halfspaces: {
      std::vector<Eigen::VectorXd> active;
      for (int k = 0; k < omega.normals.rows(); ++k) {
        if (near(omega.normals.row(k) * v, omega.offsets[k], 1e-10)) {
          active.push_back(omega.normals.row(k).transpose());
        }
      }
      if (active.empty()) {
        full();
        return cone;
      }
      if (m == 1) {
        bool up_ok = true, down_ok = true;
        for (const auto& a : active) {
          if (a[0] > kEq) up_ok = false;
          if (a[0] < -kEq) down_ok = false;
        }
        if (up_ok && down_ok) cone.lineality.push_back(unit(1, 0));
        else if (up_ok) cone.generators.push_back(unit(1, 0));
        else if (down_ok) cone.generators.push_back(-unit(1, 0));
        return cone;
      }
      if (m != 2) fail(Err::UnsupportedKind, "halfspace cones implemented for m <= 2");
      // Candidate extreme rays: rotated active normals plus inward normals
      // (the latter cover the halfplane case).
      std::vector<Eigen::VectorXd> rays;
      auto feasible = [&](const Eigen::Vector2d& r) {
        for (const auto& a : active) {
          if (a.dot(r) > 1e-10) return false;
        }
        return true;
      };
      for (const auto& a : active) {
        Eigen::Vector2d t = rot90(Eigen::Vector2d(a[0], a[1])).normalized();
        if (feasible(t)) rays.push_back(t);
        if (feasible(-t)) rays.push_back(-t);
        Eigen::Vector2d inward = -Eigen::Vector2d(a[0], a[1]).normalized();
        if (feasible(inward)) rays.push_back(inward);
      }
      // Deduplicate; opposite rays collapse into a lineality direction.
      std::vector<Eigen::VectorXd> kept;
      for (const auto& r : rays) {
        bool dup = false;
        for (const auto& q : kept) dup = dup || same_point(q, r, 1e-10);
        if (!dup) kept.push_back(r);
      }
      for (size_t i = 0; i < kept.size(); ++i) {
        bool opposite = false;
        for (size_t l = 0; l < kept.size(); ++l) {
          if (l != i && same_point(kept[i], Eigen::VectorXd(-kept[l]), 1e-10)) opposite = true;
        }
        if (opposite) {
          bool have = false;
          for (const auto& ln : cone.lineality) {
            have = have || same_point(ln, kept[i], 1e-10) ||
                   same_point(ln, Eigen::VectorXd(-kept[i]), 1e-10);
          }
          if (!have) cone.lineality.push_back(kept[i]);
        } else {
          cone.generators.push_back(kept[i]);
        }
      }
      return cone;
    }
    case OmegaKind::Ball: {
      Eigen::VectorXd n = v - omega.center;
      if (n.norm() < omega.radius - kEq) {
        full();
        return cone;
      }
      // Halfspace below the tangent hyperplane.
      Eigen::VectorXd nn = n.normalized();
      cone.generators.push_back(-nn);
      // Orthonormal basis of the tangent directions.
      Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(m, m) - nn * nn.transpose();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj, Eigen::ComputeFullU);
      for (int i = 0; i < m; ++i) {
        if (svd.singularValues()[i] > 0.5) cone.lineality.push_back(svd.matrixU().col(i));
      }
      return cone;
    }
    case OmegaKind::QuarterDisc: {
      double x = v[0], y = v[1];
      bool on_circle = near(v.norm(), 1.0);
      bool inside = v.norm() < 1.0 - kEq;
      if (near(x, 0.0) && near(y, 0.0)) {
        cone.generators.push_back(unit(2, 0));
        cone.generators.push_back(unit(2, 1));
      } else if (near(x, 0.0) && inside) {
        cone.generators.push_back(unit(2, 0));
        cone.lineality.push_back(unit(2, 1));
      } else if (near(y, 0.0) && inside) {
        cone.generators.push_back(unit(2, 1));
        cone.lineality.push_back(unit(2, 0));
      } else if (on_circle && near(x, 0.0)) {
        cone.generators.push_back(unit(2, 0));
        cone.generators.push_back(-unit(2, 1));
      } else if (on_circle && near(y, 0.0)) {
        cone.generators.push_back(-unit(2, 0));
        cone.generators.push_back(unit(2, 1));
      } else if (on_circle) {
        cone.generators.push_back(-v);
        cone.lineality.push_back(rot90(Eigen::Vector2d(v[0], v[1])));
      } else {
        full();
      }
      return cone;
    }
    case OmegaKind::AbsCone: {
      double x = v[0], y = v[1];
      Eigen::Vector2d gplus(1.0, 1.0), gminus(1.0, -1.0);
      if (y < std::abs(x) - kEq) {
        full();
      } else if (near(x, 0.0) && near(y, 0.0)) {
        cone.generators.push_back(Eigen::Vector2d(1.0, -1.0));
        cone.generators.push_back(Eigen::Vector2d(-1.0, -1.0));
      } else if (x > 0) {
        cone.lineality.push_back(gplus);
        cone.generators.push_back(Eigen::Vector2d(1.0, -1.0));
      } else {
        cone.lineality.push_back(gminus);
        cone.generators.push_back(Eigen::Vector2d(-1.0, -1.0));
      }
      return cone;
    }
    case OmegaKind::ParabolaHypograph: {
      double x0 = v[0];
      if (v[1] < x0 * x0 - kEq) {
        full();
      } else {
        cone.lineality.push_back(Eigen::Vector2d(1.0, 2.0 * x0));
        cone.generators.push_back(Eigen::Vector2d(0.0, -1.0));
      }
      return cone;
    }
    case OmegaKind::LineFan: {
      double x = v[0], y = v[1];
      if (y > kEq) {
        int k = fan_level(omega, x, y);
        Eigen::Vector2d dir(1.0, -std::ldexp(1.0, -k));
        if (near(x, 0.0)) cone.generators.push_back(dir);
        else cone.lineality.push_back(dir);
      } else if (near(x, 1.0)) {
        // point cone at the apex
      } else {
        cone.generators.push_back(unit(2, 0));
      }
      return cone;
    }
  }
  return cone;
}

bool is_dense_direction_probe(const ConstraintSet& omega, const Eigen::VectorXd& v,
                              const Eigen::VectorXd& v2) {
  require_member(omega, v);
  int hits = 0, total = 0;
  for (int k = 4; k <= 40; ++k) {
    double a = std::ldexp(1.0, -k);
    bool in = omega.member(v + a * (v2 - v), 1e-12);
    if (k >= 20) {
      ++total;
      if (in) ++hits;
    }
  }
  return hits >= static_cast<int>(std::ceil(0.9 * total));
}

bool is_stable_dense_direction_probe(const ConstraintSet& omega, const Eigen::VectorXd& v,
                                     const Eigen::VectorXd& v2, std::mt19937_64& rng) {
  require_member(omega, v);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int m = omega.dim();
  // Stable iff some radius level works for every sampled member point at that
  // level and at every finer one.
  int first_good = -1;
  for (int k = 4; k <= 20; ++k) {
    double eps = std::ldexp(1.0, -k);
    bool all_ok = true;
    int found = 0;
    for (int trial = 0; trial < 512 && found < 64; ++trial) {
      Eigen::VectorXd dir(m);
      for (int i = 0; i < m; ++i) dir[i] = gauss(rng);
      if (dir.norm() < 1e-14) continue;
      Eigen::VectorXd cand = v + dir * (eps * std::pow(unif(rng), 1.0 / m) / dir.norm());
      if (!omega.member(cand, 1e-12)) continue;
      ++found;
      if (!is_dense_direction_probe(omega, cand, v2)) {
        all_ok = false;
        break;
      }
    }
    if (all_ok) {
      if (first_good < 0) first_good = k;
    } else {
      first_good = -1;
    }
  }
  return first_good >= 0;
}

// ---------------------------------------------------------------------------
// ConvexTarget

ConvexTarget ConvexTarget::point(const Eigen::VectorXd& p) {
  ConvexTarget t(TargetKind::Point, static_cast<int>(p.size()));
  t.base = p;
  return t;
}

ConvexTarget ConvexTarget::affine_subspace(const Eigen::VectorXd& base,
                                           const Eigen::MatrixXd& dirs) {
  ConvexTarget t(TargetKind::AffineSubspace, static_cast<int>(base.size()));
  t.base = base;
  // Orthonormalize the span once.
  Eigen::MatrixXd q = dirs;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  Eigen::MatrixXd full = qr.householderQ();
  t.dirs = full.leftCols(std::min<Eigen::Index>(dirs.cols(), dirs.rows()));
  return t;
}

ConvexTarget ConvexTarget::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size() || (hi - lo).minCoeff() < 0) {
    fail(Err::DimensionMismatch, "target box bounds");
  }
  ConvexTarget t(TargetKind::Box, static_cast<int>(lo.size()));
  t.lo = lo;
  t.hi = hi;
  return t;
}

ConvexTarget ConvexTarget::ball(const Eigen::VectorXd& center, double radius) {
  ConvexTarget t(TargetKind::Ball, static_cast<int>(center.size()));
  t.center = center;
  t.radius = radius;
  return t;
}

ConvexTarget ConvexTarget::halfspaces(const Eigen::MatrixXd& normals,
                                      const Eigen::VectorXd& offsets) {
  if (normals.rows() != offsets.size()) fail(Err::DimensionMismatch, "target halfspace rows");
  ConvexTarget t(TargetKind::Halfspaces, static_cast<int>(normals.cols()));
  t.normals = normals;
  t.offsets = offsets;
  return t;
}

Eigen::VectorXd ConvexTarget::project(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) fail(Err::DimensionMismatch, "target projection dimension");
  switch (kind_) {
    case TargetKind::Point:
      return base;
    case TargetKind::AffineSubspace:
      return base + dirs * (dirs.transpose() * (x - base));
    case TargetKind::Box:
      return x.cwiseMax(lo).cwiseMin(hi);
    case TargetKind::Ball: {
      Eigen::VectorXd d = x - center;
      double n = d.norm();
      if (n <= radius) return x;
      return center + d * (radius / n);
    }
    case TargetKind::Halfspaces: {
      if (((normals * x - offsets).array() <= 1e-12).all()) return x;
      // Active-set enumeration over small row subsets.
      const int rows = static_cast<int>(normals.rows());
      const int j = dim_;
      double best = std::numeric_limits<double>::infinity();
      Eigen::VectorXd arg = x;
      for (int mask = 1; mask < (1 << rows); ++mask) {
        int count = 0;
        for (int r = 0; r < rows; ++r) count += (mask >> r) & 1;
        if (count > j) continue;
        Eigen::MatrixXd As(count, j);
        Eigen::VectorXd bs(count);
        int c = 0;
        for (int r = 0; r < rows; ++r) {
          if (mask & (1 << r)) {
            As.row(c) = normals.row(r);
            bs[c] = offsets[r];
            ++c;
          }
        }
        Eigen::MatrixXd gram = As * As.transpose();
        Eigen::VectorXd mult = gram.colPivHouseholderQr().solve(As * x - bs);
        if ((gram * mult - (As * x - bs)).norm() > 1e-9) continue;
        if ((mult.array() < -1e-10).any()) continue;  // dual feasibility
        Eigen::VectorXd y = x - As.transpose() * mult;
        if (((normals * y - offsets).array() > 1e-9).any()) continue;
        double dist = (y - x).norm();
        if (dist < best) {
          best = dist;
          arg = y;
        }
      }
      if (!std::isfinite(best)) fail(Err::UnsupportedKind, "polyhedron projection failed");
      return arg;
    }
  }
  return x;
}

double ConvexTarget::distance(const Eigen::VectorXd& x) const { return (x - project(x)).norm(); }

bool ConvexTarget::contains(const Eigen::VectorXd& x, double tol) const {
  return distance(x) <= tol;
}

bool ConvexTarget::in_orthogonal_cone(const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                                      double tol) const {
  if (!contains(x, 1e-9)) fail(Err::NotInTarget, "orthogonal cone base point not in target");
  // <x2, s - x> <= 0 for every member s iff the projection of x + x2 is x.
  return (project(x + x2) - x).norm() <= tol * (1.0 + x2.norm());
}

}  // namespace tspmp
