#pragma once

#include <optional>

#include "tspmp/expr.hpp"
#include "tspmp/geometry.hpp"
#include "tspmp/grid_function.hpp"
#include "tspmp/time_scale.hpp"

namespace tspmp {

enum class FinalTimeMode { Fixed, Free };

/// Controlled dynamics on a time scale, with running cost, boundary map into
/// a convex target, pointwise control constraints, and an optional parameter
/// block entering dynamics, cost, and boundary map.
struct ControlProblem {
  std::string name;
  int state_dim = 0;
  int control_dim = 0;
  int boundary_dim = 0;

  VectorField dynamics;
  ScalarField running_cost;
  BoundaryMap boundary;
  ConvexTarget target = ConvexTarget::point(Eigen::VectorXd::Zero(1));
  ConstraintSet omega = ConstraintSet::full_space(1);
  TimeScale scale = TimeScale({{0.0, 1.0}});

  FinalTimeMode final_time_mode = FinalTimeMode::Fixed;
  double final_time = 1.0;  // fixed value, or the candidate when free

  std::optional<Eigen::VectorXd> parameter;

  const Eigen::VectorXd* param_ptr() const { return parameter ? &*parameter : nullptr; }
};

struct SimOptions {
  double h = 1e-3;
  double blowup_threshold = 1e8;
  double control_tol = 1e-9;  // slack for the pointwise constraint check
  double target_tol = 1e-8;
};

/// Forward solution of the augmented system: state rows, the running-cost
/// coordinate (zero at the left end), and the control actually applied on
/// each grid cell.
struct Trajectory {
  GridFunction state;    // n rows
  GridFunction cost;     // 1 row, cost(a) = 0
  GridFunction control;  // m rows; value at grid[k] drives cell k
  double start_time = 0.0;
  double final_time = 0.0;

  const std::vector<double>& grid() const { return state.grid; }
  Eigen::VectorXd initial_state() const { return state.values.col(0); }
  Eigen::VectorXd final_state() const { return state.values.col(state.size() - 1); }
  double total_cost() const { return cost.values(0, cost.size() - 1); }
};

/// Integrates the augmented dynamics on [a,b]: the exact graininess step at
/// right-scattered points, classical RK4 on dense cells with the control held
/// at its left grid value.
Trajectory simulate(const ControlProblem& problem, const GridFunction& u,
                    const Eigen::VectorXd& initial_state, double final_time,
                    const SimOptions& opts = {});

double cost(const ControlProblem& problem, const GridFunction& u,
            const Eigen::VectorXd& initial_state, double final_time,
            const SimOptions& opts = {});

enum class AdmissibleReason { Ok, BlowUp, ControlOutOfOmega, TargetMissed, SimulationError };

struct AdmissibleResult {
  bool ok = false;
  AdmissibleReason reason = AdmissibleReason::SimulationError;
};

AdmissibleResult admissible(const ControlProblem& problem, const GridFunction& u,
                            const Eigen::VectorXd& initial_state, double final_time,
                            const SimOptions& opts = {});

/// Boundary value g(q(a), q(b)) of a trajectory.
Eigen::VectorXd boundary_value(const ControlProblem& problem, const Trajectory& traj);

}  // namespace tspmp
