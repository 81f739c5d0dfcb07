#pragma once

#include <optional>
#include <vector>

#include "tspmp/certificate.hpp"

namespace tspmp {

struct BruteForceResult {
  GridFunction control;
  double cost = 0.0;
  Eigen::VectorXd final_state;
  long admissible_count = 0;
};

/// Exhaustive search over per-step control candidates on a purely discrete
/// window, lexicographic tie-break. The same candidate set is used at every
/// step with the single-set overload.
BruteForceResult brute_force_discrete(const ControlProblem& problem,
                                      const std::vector<std::vector<Eigen::VectorXd>>& per_step,
                                      const Eigen::VectorXd& initial_state, double final_time,
                                      const SimOptions& opts = {});
BruteForceResult brute_force_discrete(const ControlProblem& problem,
                                      const std::vector<Eigen::VectorXd>& candidates,
                                      const Eigen::VectorXd& initial_state, double final_time,
                                      const SimOptions& opts = {});

struct MinTimeResult {
  double minimal_time = 0.0;
  BruteForceResult best;
  std::vector<double> rejected_times;  // candidates with no admissible control
};

/// Smallest candidate final time admitting an admissible control.
MinTimeResult brute_force_min_time(const ControlProblem& problem,
                                   const std::vector<Eigen::VectorXd>& candidates,
                                   const Eigen::VectorXd& initial_state,
                                   const std::vector<double>& candidate_times,
                                   const SimOptions& opts = {});

struct ShootingGuess {
  Eigen::VectorXd psi;                     // target multiplier seed
  double p0 = -1.0;                        // cost multiplier seed, <= 0
  std::optional<Eigen::VectorXd> initial_state;
  bool initial_state_fixed = false;        // when set, q(a) is not an unknown
  std::optional<double> final_time;        // seed for free final time
  std::optional<GridFunction> control;     // sweep warm start
};

struct ShootingOptions {
  SimOptions sim;
  int max_iter = 200;
  double tol = 1e-9;
  int max_sweeps = 120;
  double sweep_tol = 1e-11;
  MaximizeOptions maximize;
};

struct ShootingResult {
  Extremal extremal;
  double defect_norm = 0.0;
  int iterations = 0;
  double condition_estimate = 0.0;  // singular-value ratio of the defect Jacobian
  bool converged = false;
};

/// Root-finds the boundary-value defects of the optimality system. Windows
/// without gaps integrate the coupled state/adjoint system forward with the
/// control maximized pointwise; windows with gaps alternate forward state
/// sweeps with backward adjoint sweeps, using the weak stationarity update at
/// right-scattered points. Multipliers are normalized to the unit sphere
/// before every residual evaluation.
ShootingResult shooting_solve(const ControlProblem& problem, const ShootingGuess& guess,
                              const ShootingOptions& opts = {});

struct ProjectedGradientResult {
  GridFunction control;
  std::vector<double> cost_history;
};

/// Pointwise projected ascent of the Hamiltonian (cost descent with the
/// normal-multiplier convention). Requires a free final state (boundary map
/// independent of it) and a constraint set supporting nearest-point
/// projection.
ProjectedGradientResult projected_gradient(const ControlProblem& problem, const GridFunction& u0,
                                           const Eigen::VectorXd& initial_state, double final_time,
                                           int steps, double step_size,
                                           const SimOptions& opts = {});

}  // namespace tspmp
