#include "tspmp/variation.hpp"

#include <cmath>
#include <string>

namespace tspmp {

namespace {

// Augmented state Jacobian [[df/dq, 0], [df0/dq, 0]] along the trajectory,
// with the state linearly interpolated inside dense cells.
struct LinearizedField {
  const ControlProblem& pb;
  const Trajectory& traj;
  int cell = 0;  // current grid cell

  Eigen::MatrixXd jac(double t, const Eigen::VectorXd& u) const {
    const auto& grid = traj.grid();
    double t0 = grid[static_cast<size_t>(cell)];
    double t1 = grid[static_cast<size_t>(cell) + 1];
    double w = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
    Eigen::VectorXd q =
        (1.0 - w) * traj.state.values.col(cell) + w * traj.state.values.col(cell + 1);
    const int n = pb.state_dim;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
    a.topLeftCorner(n, n) = pb.dynamics.jac_state(q, u, t, pb.param_ptr());
    a.block(n, 0, 1, n) = pb.running_cost.grad_state(q, u, t, pb.param_ptr()).transpose();
    return a;
  }
};

// Forward integration of w' = A(t) w from grid index `first` with w(first) = w0.
GridFunction integrate_linearized(const ControlProblem& pb, const Trajectory& traj, int first,
                                  const Eigen::VectorXd& w0) {
  const auto& grid = traj.grid();
  const int npts = static_cast<int>(grid.size());
  Eigen::MatrixXd ws(w0.size(), npts - first);
  ws.col(0) = w0;
  LinearizedField lin{pb, traj, 0};
  for (int k = first; k + 1 < npts; ++k) {
    lin.cell = k;
    const double t0 = grid[static_cast<size_t>(k)];
    const double t1 = grid[static_cast<size_t>(k) + 1];
    const Eigen::VectorXd uk = traj.control.values.col(k);
    const Eigen::VectorXd w = ws.col(k - first);
    if (pb.scale.is_right_scattered(t0)) {
      ws.col(k - first + 1) = w + (t1 - t0) * (lin.jac(t0, uk) * w);
    } else {
      const double dt = t1 - t0;
      Eigen::VectorXd k1 = lin.jac(t0, uk) * w;
      Eigen::VectorXd k2 = lin.jac(t0 + 0.5 * dt, uk) * (w + 0.5 * dt * k1);
      Eigen::VectorXd k3 = lin.jac(t0 + 0.5 * dt, uk) * (w + 0.5 * dt * k2);
      Eigen::VectorXd k4 = lin.jac(t1, uk) * (w + dt * k3);
      ws.col(k - first + 1) = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  std::vector<double> subgrid(grid.begin() + first, grid.end());
  return GridFunction(subgrid, ws);
}

Eigen::VectorXd augmented_eval(const ControlProblem& pb, const Eigen::VectorXd& q,
                               const Eigen::VectorXd& u, double t) {
  Eigen::VectorXd out(pb.state_dim + 1);
  out.head(pb.state_dim) = pb.dynamics.eval(q, u, t, pb.param_ptr());
  out[pb.state_dim] = pb.running_cost.eval(q, u, t, pb.param_ptr());
  return out;
}

}  // namespace

GridFunction perturb_rs(const ConstraintSet& omega, const TimeScale& ts, const GridFunction& u,
                        const NeedleRS& needle) {
  if (!ts.is_right_scattered(needle.r)) fail(Err::NotRS, "needle time is not right-scattered");
  int k = u.require_index(needle.r);
  Eigen::VectorXd ur = u.values.col(k);
  Eigen::VectorXd moved = ur + needle.alpha * (needle.y - ur);
  if (!omega.member(moved, 1e-12)) {
    fail(Err::AlphaNotInDenseSet,
         "alpha = " + std::to_string(needle.alpha) + " leaves the constraint set");
  }
  GridFunction out = u;
  out.values.col(k) = moved;
  return out;
}

GridFunction perturb_rd(const ConstraintSet& omega, const TimeScale& ts, const GridFunction& u,
                        const NeedleRD& needle) {
  if (ts.is_right_scattered(needle.s)) fail(Err::NotRD, "needle time is not right-dense");
  if (needle.beta < 0 || !ts.contains(needle.s + needle.beta)) {
    fail(Err::BetaNotInV, "s + beta must stay in the scale");
  }
  if (!omega.member(needle.z, 1e-12)) fail(Err::NotInOmega, "needle value outside the set");
  GridFunction out = u;
  for (int k = 0; k < u.size(); ++k) {
    double t = u.grid[static_cast<size_t>(k)];
    if (t >= needle.s - GridFunction::kGridTol &&
        t < needle.s + needle.beta - GridFunction::kGridTol) {
      out.values.col(k) = needle.z;
    }
  }
  return out;
}

GridFunction variation_vector_rs(const ControlProblem& pb, const Trajectory& traj, double r,
                                 const Eigen::VectorXd& y) {
  if (!pb.scale.is_right_scattered(r)) fail(Err::NotRS, "variation seed is not right-scattered");
  int kr = traj.state.require_index(r);
  double mu = pb.scale.graininess(r);
  Eigen::VectorXd q = traj.state.values.col(kr);
  Eigen::VectorXd ur = traj.control.values.col(kr);
  const int n = pb.state_dim;
  Eigen::MatrixXd bu(n + 1, pb.control_dim);
  bu.topRows(n) = pb.dynamics.jac_control(q, ur, r, pb.param_ptr());
  bu.row(n) = pb.running_cost.grad_control(q, ur, r, pb.param_ptr()).transpose();
  Eigen::VectorXd w0 = mu * (bu * (y - ur));
  return integrate_linearized(pb, traj, kr + 1, w0);
}

GridFunction variation_vector_rd(const ControlProblem& pb, const Trajectory& traj, double s,
                                 const Eigen::VectorXd& z) {
  if (pb.scale.is_right_scattered(s)) fail(Err::NotRD, "variation seed is not right-dense");
  int ks = traj.state.require_index(s);
  Eigen::VectorXd q = traj.state.values.col(ks);
  Eigen::VectorXd us = traj.control.values.col(ks);
  Eigen::VectorXd w0 = augmented_eval(pb, q, z, s) - augmented_eval(pb, q, us, s);
  return integrate_linearized(pb, traj, ks, w0);
}

GridFunction variation_vector_init(const ControlProblem& pb, const Trajectory& traj,
                                   const Eigen::VectorXd& dq_a) {
  if (dq_a.size() != pb.state_dim) fail(Err::DimensionMismatch, "initial direction dimension");
  Eigen::VectorXd w0(pb.state_dim + 1);
  w0.head(pb.state_dim) = dq_a;
  w0[pb.state_dim] = 0.0;
  return integrate_linearized(pb, traj, 0, w0);
}

namespace {

// Sup-norm of (augmented difference)/size - w over the grid from index `first`.
double quotient_error(const Trajectory& base, const Trajectory& pert, const GridFunction& w,
                      double size, int first_in_w) {
  double worst = 0.0;
  for (int k = first_in_w; k < w.size(); ++k) {
    double t = w.grid[static_cast<size_t>(k)];
    int kb = base.state.require_index(t);
    int kp = pert.state.require_index(t);
    Eigen::VectorXd diff(base.state.dim() + 1);
    diff.head(base.state.dim()) = pert.state.values.col(kp) - base.state.values.col(kb);
    diff[base.state.dim()] = pert.cost.values(0, kp) - base.cost.values(0, kb);
    worst = std::max(worst, (diff / size - w.values.col(k)).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace

std::vector<std::pair<double, double>> fd_check_rs(const ControlProblem& pb, const GridFunction& u,
                                                   const Eigen::VectorXd& q_a, double b, double r,
                                                   const Eigen::VectorXd& y,
                                                   const std::vector<double>& alphas,
                                                   const SimOptions& opts) {
  Trajectory base = simulate(pb, u, q_a, b, opts);
  GridFunction w = variation_vector_rs(pb, base, r, y);
  std::vector<std::pair<double, double>> out;
  for (double alpha : alphas) {
    GridFunction up = perturb_rs(pb.omega, pb.scale, u, NeedleRS{r, y, alpha});
    Trajectory pert = simulate(pb, up, q_a, b, opts);
    out.push_back({alpha, quotient_error(base, pert, w, alpha, 0)});
  }
  return out;
}

std::vector<std::pair<double, double>> fd_check_rd(const ControlProblem& pb, const GridFunction& u,
                                                   const Eigen::VectorXd& q_a, double b, double s,
                                                   const Eigen::VectorXd& z,
                                                   const std::vector<double>& betas,
                                                   const SimOptions& opts) {
  Trajectory base0 = simulate(pb, u, q_a, b, opts);
  GridFunction w = variation_vector_rd(pb, base0, s, z);
  // Differentiability is guaranteed from the first grid point after s on.
  int ks = base0.state.require_index(s);
  if (ks + 1 >= base0.state.size()) fail(Err::NotOnGrid, "no grid point after s");
  double delta = base0.grid()[static_cast<size_t>(ks) + 1] - s;
  std::vector<std::pair<double, double>> out;
  for (double beta : betas) {
    if (beta <= 0 || beta > delta + GridFunction::kGridTol) {
      fail(Err::BetaNotInV, "beta must lie in (0, first grid gap after s]");
    }
    if (!pb.scale.contains(s + beta)) fail(Err::BetaNotInV, "s + beta leaves the scale");
    // Refine both controls with the switch point so the two runs share cells.
    std::vector<double> refined = merge_grids(u.grid, {s, s + beta});
    GridFunction ubase = GridFunction::sampled(refined, [&](double t) { return u.left_value(t); });
    GridFunction upert = ubase;
    for (int k = 0; k < upert.size(); ++k) {
      double t = upert.grid[static_cast<size_t>(k)];
      if (t >= s - GridFunction::kGridTol && t < s + beta - GridFunction::kGridTol) {
        upert.values.col(k) = z;
      }
    }
    Trajectory base = simulate(pb, ubase, q_a, b, opts);
    Trajectory pert = simulate(pb, upert, q_a, b, opts);
    out.push_back({beta, quotient_error(base, pert, w, beta, 1)});
  }
  return out;
}

std::vector<std::pair<double, double>> fd_check_init(const ControlProblem& pb,
                                                     const GridFunction& u,
                                                     const Eigen::VectorXd& q_a, double b,
                                                     const Eigen::VectorXd& dq_a,
                                                     const std::vector<double>& gammas,
                                                     const SimOptions& opts) {
  Trajectory base = simulate(pb, u, q_a, b, opts);
  GridFunction w = variation_vector_init(pb, base, dq_a);
  std::vector<std::pair<double, double>> out;
  for (double gamma : gammas) {
    Trajectory pert = simulate(pb, u, q_a + gamma * dq_a, b, opts);
    out.push_back({gamma, quotient_error(base, pert, w, gamma, 0)});
  }
  return out;
}

}  // namespace tspmp
