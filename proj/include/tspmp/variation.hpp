#pragma once

#include <vector>

#include "tspmp/problem.hpp"

namespace tspmp {

/// Single-point control perturbation at a right-scattered time:
/// u(r) moves to u(r) + alpha*(y - u(r)).
struct NeedleRS {
  double r = 0.0;
  Eigen::VectorXd y;
  double alpha = 0.0;
};

/// Short-interval control perturbation at a right-dense time:
/// the control equals z on [s, s+beta).
struct NeedleRD {
  double s = 0.0;
  Eigen::VectorXd z;
  double beta = 0.0;
};

GridFunction perturb_rs(const ConstraintSet& omega, const TimeScale& ts, const GridFunction& u,
                        const NeedleRS& needle);
GridFunction perturb_rd(const ConstraintSet& omega, const TimeScale& ts, const GridFunction& u,
                        const NeedleRD& needle);

/// Linearized augmented flow seeded by a right-scattered needle, defined on
/// [sigma(r), b]. Rows: state directions plus the cost row.
GridFunction variation_vector_rs(const ControlProblem& problem, const Trajectory& traj, double r,
                                 const Eigen::VectorXd& y);

/// Linearized augmented flow seeded at a right-dense time s by swapping the
/// control value to z, defined on [s, b].
GridFunction variation_vector_rd(const ControlProblem& problem, const Trajectory& traj, double s,
                                 const Eigen::VectorXd& z);

/// Linearized augmented flow seeded by an initial-state direction, on [a, b].
GridFunction variation_vector_init(const ControlProblem& problem, const Trajectory& traj,
                                   const Eigen::VectorXd& dq_a);

/// For each perturbation size, the sup over the comparison window of
/// || (augmented state difference)/size - variation vector ||.
std::vector<std::pair<double, double>> fd_check_rs(const ControlProblem& problem,
                                                   const GridFunction& u,
                                                   const Eigen::VectorXd& q_a, double b, double r,
                                                   const Eigen::VectorXd& y,
                                                   const std::vector<double>& alphas,
                                                   const SimOptions& opts = {});

std::vector<std::pair<double, double>> fd_check_rd(const ControlProblem& problem,
                                                   const GridFunction& u,
                                                   const Eigen::VectorXd& q_a, double b, double s,
                                                   const Eigen::VectorXd& z,
                                                   const std::vector<double>& betas,
                                                   const SimOptions& opts = {});

std::vector<std::pair<double, double>> fd_check_init(const ControlProblem& problem,
                                                     const GridFunction& u,
                                                     const Eigen::VectorXd& q_a, double b,
                                                     const Eigen::VectorXd& dq_a,
                                                     const std::vector<double>& gammas,
                                                     const SimOptions& opts = {});

}  // namespace tspmp
