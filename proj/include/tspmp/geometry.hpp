#pragma once

#include <Eigen/Core>
#include <random>
#include <vector>

#include "tspmp/errors.hpp"

namespace tspmp {

/// Closed convex cone with vertex `vertex`, spanned by the rays `generators`
/// and the full lines `lineality`. Empty generators and lineality encode the
/// point cone {vertex}.
struct Cone {
  Eigen::VectorXd vertex;
  std::vector<Eigen::VectorXd> generators;
  std::vector<Eigen::VectorXd> lineality;

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
};

bool cone_equal(const Cone& a, const Cone& b, double tol = 1e-9);

enum class OmegaKind {
  FullSpace,
  Singleton,
  Box,
  Ball,
  Halfspaces,
  FiniteSet,
  AbsCone,            // v2 <= |v1| in the plane
  ParabolaHypograph,  // v2 <= v1^2 in the plane
  QuarterDisc,        // v1 >= 0, v2 >= 0, |v| <= 1
  LineFan,            // segments v2 = (1 - v1)/2^k, 0 <= v1 <= 1, plus the base segment
};

/// Pointwise control-constraint set: a closed subset of R^m with an exact
/// membership test per kind. Boundary points count as members.
class ConstraintSet {
 public:
  static ConstraintSet full_space(int m);
  static ConstraintSet singleton(const Eigen::VectorXd& v);
  static ConstraintSet box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
  static ConstraintSet ball(const Eigen::VectorXd& center, double radius);
  static ConstraintSet halfspaces(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets);
  static ConstraintSet finite_set(const std::vector<Eigen::VectorXd>& points);
  static ConstraintSet abs_cone();
  static ConstraintSet parabola_hypograph();
  static ConstraintSet quarter_disc();
  static ConstraintSet line_fan(int max_level = 60);

  OmegaKind kind() const { return kind_; }
  int dim() const { return dim_; }

  bool member(const Eigen::VectorXd& v, double tol = 0.0) const;
  /// Nearest point of the set; available for Box, Ball, Singleton, FiniteSet.
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;

  // Kind-specific data, exposed for the closed-form direction logic.
  Eigen::VectorXd point;
  Eigen::VectorXd lo, hi;
  Eigen::VectorXd center;
  double radius = 0.0;
  Eigen::MatrixXd normals;
  Eigen::VectorXd offsets;
  std::vector<Eigen::VectorXd> points;
  int max_level = 60;

 private:
  ConstraintSet(OmegaKind k, int m) : kind_(k), dim_(m) {}
  OmegaKind kind_;
  int dim_;
};

/// Membership of v + alpha*(v2 - v) for each alpha; alpha = 0 is always true.
std::vector<bool> alpha_set_probe(const ConstraintSet& omega, const Eigen::VectorXd& v,
                                  const Eigen::VectorXd& v2, const std::vector<double>& alphas);

/// Is v2 a direction from v along which membership parameters accumulate at 0?
bool is_dense_direction(const ConstraintSet& omega, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& v2);

/// Does the dense-direction property persist for every member point near v?
bool is_stable_dense_direction(const ConstraintSet& omega, const Eigen::VectorXd& v,
                               const Eigen::VectorXd& v2);

/// Closed convex cone of vertex v spanned by the stable dense directions.
Cone stable_cone(const ConstraintSet& omega, const Eigen::VectorXd& v);

/// Heuristic fallbacks deciding the same predicates by dyadic probing; used
/// to cross-check the closed forms, and labeled heuristic in reports.
bool is_dense_direction_probe(const ConstraintSet& omega, const Eigen::VectorXd& v,
                              const Eigen::VectorXd& v2);
bool is_stable_dense_direction_probe(const ConstraintSet& omega, const Eigen::VectorXd& v,
                                     const Eigen::VectorXd& v2, std::mt19937_64& rng);

enum class TargetKind { Point, AffineSubspace, Box, Ball, Halfspaces };

/// Nonempty closed convex terminal-constraint set with single-valued
/// Euclidean projection.
class ConvexTarget {
 public:
  static ConvexTarget point(const Eigen::VectorXd& p);
  static ConvexTarget affine_subspace(const Eigen::VectorXd& base, const Eigen::MatrixXd& dirs);
  static ConvexTarget box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
  static ConvexTarget ball(const Eigen::VectorXd& center, double radius);
  /// Bounded polyhedron {x | normals*x <= offsets}.
  static ConvexTarget halfspaces(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets);

  TargetKind kind() const { return kind_; }
  int dim() const { return dim_; }

  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  double distance(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;

  /// x2 in the orthogonal cone at x (x must be a member): <x2, s - x> <= tol
  /// for every member s. Decided through the projection identity
  /// P(x + x2) = x, which is exact for every supported kind.
  bool in_orthogonal_cone(const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                          double tol = 1e-9) const;

  Eigen::VectorXd base;
  Eigen::MatrixXd dirs;  // orthonormal columns for AffineSubspace
  Eigen::VectorXd lo, hi;
  Eigen::VectorXd center;
  double radius = 0.0;
  Eigen::MatrixXd normals;
  Eigen::VectorXd offsets;

 private:
  ConvexTarget(TargetKind k, int j) : kind_(k), dim_(j) {}
  TargetKind kind_;
  int dim_;
};

}  // namespace tspmp
