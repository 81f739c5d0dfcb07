#include "tspmp/problem.hpp"

#include <cmath>
#include <string>

namespace tspmp {

namespace {

struct AugmentedField {
  const ControlProblem& pb;

  // (f, f0) stacked; the cost coordinate never feeds back.
  Eigen::VectorXd operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) const {
    Eigen::VectorXd q = x.head(pb.state_dim);
    Eigen::VectorXd out(pb.state_dim + 1);
    out.head(pb.state_dim) = pb.dynamics.eval(q, u, t, pb.param_ptr());
    out[pb.state_dim] = pb.running_cost.eval(q, u, t, pb.param_ptr());
    return out;
  }
};

void guard(const Eigen::VectorXd& x, double t, double threshold) {
  if (!x.allFinite() || x.head(x.size() - 1).lpNorm<Eigen::Infinity>() > threshold) {
    fail(Err::BlowUp, "state escaped before t = " + std::to_string(t));
  }
}

}  // namespace

Trajectory simulate(const ControlProblem& pb, const GridFunction& u,
                    const Eigen::VectorXd& q_a, double b, const SimOptions& opts) {
  const TimeScale& ts = pb.scale;
  const double a = ts.min_time();
  if (!ts.contains(b) || b <= a + TimeScale::kSnapTol) {
    fail(Err::NotInScale, "final time not in the scale beyond its start");
  }
  if (q_a.size() != pb.state_dim) fail(Err::DimensionMismatch, "initial state dimension");
  if (u.dim() != pb.control_dim) fail(Err::DimensionMismatch, "control dimension");
  if (u.grid.empty() || u.grid.front() > a + GridFunction::kGridTol) {
    fail(Err::GridMismatch, "control grid must start at the scale origin");
  }

  std::vector<double> grid = ts.sample_grid(a, b, opts.h);
  {
    std::vector<double> extra;
    for (double t : u.grid) {
      if (t > a + GridFunction::kGridTol && t < b - GridFunction::kGridTol && ts.contains(t)) {
        extra.push_back(ts.snap(t));
      }
    }
    grid = merge_grids(grid, extra);
  }
  const int npts = static_cast<int>(grid.size());

  AugmentedField field{pb};
  Eigen::MatrixXd xs(pb.state_dim + 1, npts);
  Eigen::MatrixXd us(pb.control_dim, npts);
  xs.col(0).head(pb.state_dim) = q_a;
  xs(pb.state_dim, 0) = 0.0;

  for (int k = 0; k + 1 < npts; ++k) {
    const double t0 = grid[static_cast<size_t>(k)];
    const double t1 = grid[static_cast<size_t>(k) + 1];
    const Eigen::VectorXd uk = u.left_value(t0);
    if (!pb.omega.member(uk, opts.control_tol)) {
      fail(Err::ControlOutOfOmega, "control leaves the constraint set at t = " + std::to_string(t0));
    }
    us.col(k) = uk;
    const Eigen::VectorXd x0 = xs.col(k);
    if (ts.is_right_scattered(t0)) {
      // Forced by delta-differentiability across the gap.
      xs.col(k + 1) = x0 + (t1 - t0) * field(x0, uk, t0);
    } else {
      const double dt = t1 - t0;
      Eigen::VectorXd k1 = field(x0, uk, t0);
      Eigen::VectorXd k2 = field(x0 + 0.5 * dt * k1, uk, t0 + 0.5 * dt);
      Eigen::VectorXd k3 = field(x0 + 0.5 * dt * k2, uk, t0 + 0.5 * dt);
      Eigen::VectorXd k4 = field(x0 + dt * k3, uk, t1);
      xs.col(k + 1) = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    guard(xs.col(k + 1), t1, opts.blowup_threshold);
  }
  us.col(npts - 1) = us.col(npts - 2);

  Trajectory traj;
  traj.state = GridFunction(grid, xs.topRows(pb.state_dim));
  traj.cost = GridFunction(grid, xs.bottomRows(1));
  traj.control = GridFunction(grid, us);
  traj.start_time = a;
  traj.final_time = b;
  return traj;
}

double cost(const ControlProblem& pb, const GridFunction& u, const Eigen::VectorXd& q_a,
            double b, const SimOptions& opts) {
  return simulate(pb, u, q_a, b, opts).total_cost();
}

AdmissibleResult admissible(const ControlProblem& pb, const GridFunction& u,
                            const Eigen::VectorXd& q_a, double b, const SimOptions& opts) {
  AdmissibleResult res;
  try {
    Trajectory traj = simulate(pb, u, q_a, b, opts);
    Eigen::VectorXd g = boundary_value(pb, traj);
    if (!pb.target.contains(g, opts.target_tol)) {
      res.reason = AdmissibleReason::TargetMissed;
      return res;
    }
    res.ok = true;
    res.reason = AdmissibleReason::Ok;
  } catch (const Error& e) {
    switch (e.code()) {
      case Err::BlowUp: res.reason = AdmissibleReason::BlowUp; break;
      case Err::ControlOutOfOmega: res.reason = AdmissibleReason::ControlOutOfOmega; break;
      default: res.reason = AdmissibleReason::SimulationError; break;
    }
  }
  return res;
}

Eigen::VectorXd boundary_value(const ControlProblem& pb, const Trajectory& traj) {
  return pb.boundary.eval(traj.initial_state(), traj.final_state(), pb.param_ptr());
}

}  // namespace tspmp
