#include "tspmp/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace tspmp {

// ---------------------------------------------------------------------------
// Brute force

BruteForceResult brute_force_discrete(const ControlProblem& pb,
                                      const std::vector<std::vector<Eigen::VectorXd>>& per_step,
                                      const Eigen::VectorXd& q_a, double b,
                                      const SimOptions& opts) {
  const TimeScale& ts = pb.scale;
  std::vector<double> grid = ts.sample_grid(ts.min_time(), b, 1.0);
  const int steps = static_cast<int>(grid.size()) - 1;
  for (int k = 0; k < steps; ++k) {
    if (!ts.is_right_scattered(grid[static_cast<size_t>(k)])) {
      fail(Err::UnsupportedKind, "brute force needs a purely discrete window");
    }
  }
  if (steps > 12) fail(Err::TooLarge, "more than 12 steps");
  if (static_cast<int>(per_step.size()) != steps) {
    fail(Err::DimensionMismatch, "per-step candidate list length");
  }
  double combos = 1.0;
  for (const auto& set : per_step) {
    if (set.empty()) fail(Err::NoAdmissibleControl, "empty candidate set");
    combos *= static_cast<double>(set.size());
    if (combos > 1e4) fail(Err::TooLarge, "more than 1e4 control combinations");
  }
  for (const auto& set : per_step) {
    for (const auto& v : set) {
      if (!pb.omega.member(v, opts.control_tol)) {
        fail(Err::ControlOutOfOmega, "candidate control outside the constraint set");
      }
    }
  }

  BruteForceResult best;
  bool found = false;
  std::vector<int> idx(static_cast<size_t>(steps), 0);
  Eigen::MatrixXd us(pb.control_dim, steps + 1);
  while (true) {
    // Exact recursion across the gaps.
    Eigen::VectorXd q = q_a;
    double c = 0.0;
    for (int k = 0; k < steps; ++k) {
      double t = grid[static_cast<size_t>(k)];
      double mu = grid[static_cast<size_t>(k) + 1] - t;
      const Eigen::VectorXd& uk = per_step[static_cast<size_t>(k)][static_cast<size_t>(idx[k])];
      us.col(k) = uk;
      c += mu * pb.running_cost.eval(q, uk, t, pb.param_ptr());
      q = q + mu * pb.dynamics.eval(q, uk, t, pb.param_ptr());
    }
    us.col(steps) = us.col(steps - 1);
    Eigen::VectorXd g = pb.boundary.eval(q_a, q, pb.param_ptr());
    if (pb.target.contains(g, opts.target_tol)) {
      ++best.admissible_count;
      if (!found || c < best.cost) {
        // Lexicographic enumeration order makes strict improvement keep the
        // lexicographically smallest control among ties.
        found = true;
        best.cost = c;
        best.control = GridFunction(grid, us);
        best.final_state = q;
      }
    }
    int k = steps - 1;
    while (k >= 0 && idx[k] + 1 >= static_cast<int>(per_step[static_cast<size_t>(k)].size())) {
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
    ++idx[k];
  }
  if (!found) fail(Err::NoAdmissibleControl, "no candidate meets the target");
  return best;
}

BruteForceResult brute_force_discrete(const ControlProblem& pb,
                                      const std::vector<Eigen::VectorXd>& candidates,
                                      const Eigen::VectorXd& q_a, double b,
                                      const SimOptions& opts) {
  const TimeScale& ts = pb.scale;
  std::vector<double> grid = ts.sample_grid(ts.min_time(), b, 1.0);
  std::vector<std::vector<Eigen::VectorXd>> per_step(grid.size() - 1, candidates);
  return brute_force_discrete(pb, per_step, q_a, b, opts);
}

MinTimeResult brute_force_min_time(const ControlProblem& pb,
                                   const std::vector<Eigen::VectorXd>& candidates,
                                   const Eigen::VectorXd& q_a,
                                   const std::vector<double>& candidate_times,
                                   const SimOptions& opts) {
  MinTimeResult out;
  for (double b : candidate_times) {
    try {
      out.best = brute_force_discrete(pb, candidates, q_a, b, opts);
      out.minimal_time = b;
      return out;
    } catch (const Error& e) {
      if (e.code() != Err::NoAdmissibleControl) throw;
      out.rejected_times.push_back(b);
    }
  }
  fail(Err::NoAdmissibleControl, "no candidate final time is reachable");
}

// ---------------------------------------------------------------------------
// Shooting

namespace {

struct NormalizedMultiplier {
  double p0;
  Eigen::VectorXd psi;
};

NormalizedMultiplier normalize(double p0_raw, const Eigen::VectorXd& psi_raw) {
  double s = std::sqrt(p0_raw * p0_raw + psi_raw.squaredNorm());
  if (s < 1e-14) s = 1.0;
  return {-std::abs(p0_raw) / s, psi_raw / s};
}

// Weak stationarity update at a right-scattered point: projected ascent step
// on the Hamiltonian with a curvature-scaled step.
Eigen::VectorXd rs_stationarity_update(const ControlProblem& pb, const Eigen::VectorXd& q,
                                       const Eigen::VectorXd& u0, const Eigen::VectorXd& p_sigma,
                                       double p0, double t) {
  Eigen::VectorXd u = u0;
  const int m = pb.control_dim;
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXd g = hamiltonian_grad_control(pb, q, u, p_sigma, p0, t);
    // Diagonal curvature estimate by central differences.
    double step = 1.0;
    double curv_max = 0.0;
    for (int i = 0; i < m; ++i) {
      double dd = 1e-5;
      Eigen::VectorXd up = u, um = u;
      up[i] += dd;
      um[i] -= dd;
      double c = (hamiltonian(pb, q, up, p_sigma, p0, t) -
                  2.0 * hamiltonian(pb, q, u, p_sigma, p0, t) +
                  hamiltonian(pb, q, um, p_sigma, p0, t)) /
                 (dd * dd);
      curv_max = std::max(curv_max, std::abs(c));
    }
    if (curv_max > 1e-12) step = 1.0 / curv_max;
    Eigen::VectorXd un = pb.omega.project(u + step * g);
    if ((un - u).lpNorm<Eigen::Infinity>() < 1e-13) return un;
    u = un;
  }
  return u;
}

class SweepEngine {
 public:
  SweepEngine(const ControlProblem& pb, const ShootingOptions& opts) : pb_(pb), opts_(opts) {}

  // Solves the inner Hamiltonian-consistency fixed point for the given
  // multipliers; returns trajectory + adjoint. Warm-starts from the previous
  // converged control.
  struct SweepOutput {
    Trajectory traj;
    GridFunction adjoint;
    bool converged = false;
  };

  SweepOutput run(const Eigen::VectorXd& q_a, double b, const NormalizedMultiplier& mult) {
    if (!u_) {
      std::vector<double> grid = pb_.scale.sample_grid(pb_.scale.min_time(), b, opts_.sim.h);
      Eigen::VectorXd u0 = pb_.omega.project(Eigen::VectorXd::Zero(pb_.control_dim));
      u_ = GridFunction::constant(grid, u0);
    }
    SweepOutput out;
    double relax = 1.0;
    double prev_change = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < opts_.max_sweeps; ++sweep) {
      out.traj = simulate(pb_, *u_, q_a, b, opts_.sim);
      Eigen::VectorXd p_b =
          pb_.boundary.jac_final(out.traj.initial_state(), out.traj.final_state(), pb_.param_ptr())
              .transpose() *
          mult.psi;
      out.adjoint = adjoint_solve(pb_, out.traj, p_b, mult.p0);
      // Control update on the trajectory grid.
      GridFunction unew = out.traj.control;
      const auto& grid = out.traj.grid();
      for (int k = 0; k + 1 < static_cast<int>(grid.size()); ++k) {
        double t = grid[static_cast<size_t>(k)];
        Eigen::VectorXd q = out.traj.state.values.col(k);
        Eigen::VectorXd psig = pb_.scale.is_right_scattered(t) ? out.adjoint.values.col(k + 1)
                                                               : out.adjoint.values.col(k);
        if (pb_.scale.is_right_scattered(t)) {
          unew.values.col(k) =
              rs_stationarity_update(pb_, q, out.traj.control.values.col(k), psig, mult.p0, t);
        } else {
          MaximizeOptions mo = opts_.maximize;
          unew.values.col(k) =
              maximize_hamiltonian(pb_, q, psig, mult.p0, t, mo).argmax;
        }
      }
      unew.values.col(unew.size() - 1) = unew.values.col(unew.size() - 2);
      double change = (unew.values - out.traj.control.values).lpNorm<Eigen::Infinity>();
      if (change > prev_change * 1.05) relax = std::max(0.125, relax * 0.5);
      prev_change = change;
      u_->values = out.traj.control.values + relax * (unew.values - out.traj.control.values);
      if (change * relax < opts_.sweep_tol) {
        out.converged = true;
        out.traj = simulate(pb_, *u_, q_a, b, opts_.sim);
        out.adjoint = adjoint_solve(
            pb_, out.traj,
            pb_.boundary
                    .jac_final(out.traj.initial_state(), out.traj.final_state(), pb_.param_ptr())
                    .transpose() *
                mult.psi,
            mult.p0);
        return out;
      }
    }
    return out;
  }

  void warm_start(const GridFunction& u) { u_ = u; }

 private:
  const ControlProblem& pb_;
  const ShootingOptions& opts_;
  std::optional<GridFunction> u_;
};

// Coupled forward integration of state + adjoint with pointwise maximization;
// valid on windows without right-scattered points.
struct CoupledOutput {
  Trajectory traj;
  GridFunction adjoint;
};

CoupledOutput integrate_coupled(const ControlProblem& pb, const Eigen::VectorXd& q_a,
                                const Eigen::VectorXd& p_a, double b,
                                const NormalizedMultiplier& mult, const ShootingOptions& opts) {
  const TimeScale& ts = pb.scale;
  std::vector<double> grid = ts.sample_grid(ts.min_time(), b, opts.sim.h);
  const int npts = static_cast<int>(grid.size());
  const int n = pb.state_dim;
  Eigen::MatrixXd xs(n + 1, npts), ps(n, npts), us(pb.control_dim, npts);
  xs.col(0).head(n) = q_a;
  xs(n, 0) = 0.0;
  ps.col(0) = p_a;
  MaximizeOptions mo = opts.maximize;
  auto argmax_u = [&](const Eigen::VectorXd& q, const Eigen::VectorXd& p, double t) {
    return maximize_hamiltonian(pb, q, p, mult.p0, t, mo).argmax;
  };
  auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& p, double t,
                 Eigen::VectorXd* dx, Eigen::VectorXd* dp) {
    Eigen::VectorXd q = x.head(n);
    Eigen::VectorXd u = argmax_u(q, p, t);
    dx->resize(n + 1);
    dx->head(n) = pb.dynamics.eval(q, u, t, pb.param_ptr());
    (*dx)[n] = pb.running_cost.eval(q, u, t, pb.param_ptr());
    *dp = -(pb.dynamics.jac_state(q, u, t, pb.param_ptr()).transpose() * p +
            mult.p0 * pb.running_cost.grad_state(q, u, t, pb.param_ptr()));
  };
  for (int k = 0; k + 1 < npts; ++k) {
    double t0 = grid[static_cast<size_t>(k)];
    double t1 = grid[static_cast<size_t>(k) + 1];
    if (ts.is_right_scattered(t0)) {
      fail(Err::UnsupportedKind, "coupled shooting on a window with gaps");
    }
    double dt = t1 - t0;
    Eigen::VectorXd x = xs.col(k), p = ps.col(k);
    us.col(k) = argmax_u(x.head(n), p, t0);
    Eigen::VectorXd k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p;
    rhs(x, p, t0, &k1x, &k1p);
    rhs(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p, t0 + 0.5 * dt, &k2x, &k2p);
    rhs(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p, t0 + 0.5 * dt, &k3x, &k3p);
    rhs(x + dt * k3x, p + dt * k3p, t1, &k4x, &k4p);
    xs.col(k + 1) = x + (dt / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x);
    ps.col(k + 1) = p + (dt / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (!xs.col(k + 1).allFinite() ||
        xs.col(k + 1).head(n).lpNorm<Eigen::Infinity>() > opts.sim.blowup_threshold) {
      fail(Err::BlowUp, "coupled integration escaped");
    }
  }
  us.col(npts - 1) = argmax_u(xs.col(npts - 1).head(n), ps.col(npts - 1), grid.back());

  CoupledOutput out;
  out.traj.state = GridFunction(grid, xs.topRows(n));
  out.traj.cost = GridFunction(grid, xs.bottomRows(1));
  out.traj.control = GridFunction(grid, us);
  out.traj.start_time = ts.min_time();
  out.traj.final_time = b;
  out.adjoint = GridFunction(grid, ps);
  return out;
}

}  // namespace

ShootingResult shooting_solve(const ControlProblem& pb, const ShootingGuess& guess,
                              const ShootingOptions& opts) {
  if (guess.p0 > 0.0) fail(Err::DimensionMismatch, "cost multiplier seed must be <= 0");
  const int n = pb.state_dim;
  const int j = pb.boundary_dim;
  const bool free_time = pb.final_time_mode == FinalTimeMode::Free;
  const bool qa_unknown = !guess.initial_state_fixed;
  Eigen::VectorXd qa_seed = guess.initial_state.value_or(Eigen::VectorXd::Zero(n));
  double b_seed = guess.final_time.value_or(pb.final_time);
  Eigen::VectorXd psi_seed =
      guess.psi.size() == j ? guess.psi : Eigen::VectorXd::Zero(j);

  const bool has_gaps =
      !pb.scale.right_scattered_points(pb.scale.min_time(), b_seed).empty();
  if (free_time && has_gaps) {
    fail(Err::NoConvergence, "free final time supported only on gap-free windows");
  }

  const int dim = j + (qa_unknown ? n : 0) + (free_time ? 1 : 0);
  Eigen::VectorXd x(dim);
  x.head(j) = psi_seed;
  if (qa_unknown) x.segment(j, n) = qa_seed;
  if (free_time) x[dim - 1] = b_seed;

  SweepEngine sweeps(pb, opts);
  if (guess.control) sweeps.warm_start(*guess.control);

  struct EvalOut {
    Eigen::VectorXd defect;
    Trajectory traj;
    GridFunction adjoint;
    NormalizedMultiplier mult;
    bool inner_ok = true;
  };

  Eigen::VectorXd qb_estimate = qa_seed;  // lagged final state for jac_init

  auto evaluate = [&](const Eigen::VectorXd& xv) {
    EvalOut out;
    Eigen::VectorXd psi_raw = xv.head(j);
    out.mult = normalize(guess.p0, psi_raw);
    Eigen::VectorXd qa = qa_unknown ? Eigen::VectorXd(xv.segment(j, n)) : qa_seed;
    double b = free_time ? xv[dim - 1] : b_seed;
    if (free_time && !pb.scale.contains(b)) {
      // Keep the unknown inside the scale; heavy penalty directs the solver back.
      out.defect = Eigen::VectorXd::Constant(dim, 1e3);
      out.inner_ok = false;
      return out;
    }
    if (has_gaps) {
      auto sw = sweeps.run(qa, b, out.mult);
      out.traj = sw.traj;
      out.adjoint = sw.adjoint;
      out.inner_ok = sw.converged;
    } else {
      Eigen::VectorXd p_a =
          -pb.boundary.jac_init(qa, qb_estimate, pb.param_ptr()).transpose() * out.mult.psi;
      auto co = integrate_coupled(pb, qa, p_a, b, out.mult, opts);
      out.traj = co.traj;
      out.adjoint = co.adjoint;
      qb_estimate = out.traj.final_state();
    }
    Eigen::VectorXd qa_t = out.traj.initial_state();
    Eigen::VectorXd qb_t = out.traj.final_state();
    Eigen::VectorXd g = pb.boundary.eval(qa_t, qb_t, pb.param_ptr());
    Eigen::VectorXd defect(dim);
    // Target membership and sign condition folded into one projection residual.
    defect.head(j) = g - pb.target.project(g - out.mult.psi);
    if (qa_unknown) {
      if (has_gaps) {
        // Backward sweep fixes p(b); the initial transversality is the residual.
        Eigen::VectorXd pa_expect =
            -pb.boundary.jac_init(qa_t, qb_t, pb.param_ptr()).transpose() * out.mult.psi;
        defect.segment(j, n) = out.adjoint.values.col(0) - pa_expect;
      } else {
        // Forward integration fixes p(a); the terminal transversality is the residual.
        Eigen::VectorXd pb_expect =
            pb.boundary.jac_final(qa_t, qb_t, pb.param_ptr()).transpose() * out.mult.psi;
        defect.segment(j, n) = out.adjoint.values.col(out.adjoint.size() - 1) - pb_expect;
      }
    }
    if (free_time) {
      double b_t = out.traj.final_time;
      Eigen::VectorXd qb = out.traj.state.at(b_t);
      Eigen::VectorXd pb_sig = out.adjoint.at(b_t);
      defect[dim - 1] =
          maximize_hamiltonian(pb, qb, pb_sig, out.mult.p0, b_t, opts.maximize).value;
    }
    out.defect = defect;
    return out;
  };

  EvalOut cur = evaluate(x);
  double lambda = 1e-3;
  int iters = 0;
  Eigen::MatrixXd jac(dim, dim);
  for (; iters < opts.max_iter && cur.defect.norm() > opts.tol; ++iters) {
    // Finite-difference Jacobian of the defect map.
    for (int c = 0; c < dim; ++c) {
      double step = 1e-6 * (1.0 + std::abs(x[c]));
      Eigen::VectorXd xp = x;
      xp[c] += step;
      jac.col(c) = (evaluate(xp).defect - cur.defect) / step;
    }
    bool stepped = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd lhs = jac.transpose() * jac +
                            lambda * Eigen::MatrixXd::Identity(dim, dim);
      Eigen::VectorXd delta = lhs.ldlt().solve(-jac.transpose() * cur.defect);
      EvalOut cand = evaluate(x + delta);
      if (cand.defect.norm() < cur.defect.norm()) {
        x += delta;
        cur = cand;
        lambda = std::max(1e-12, lambda * 0.3);
        stepped = true;
        break;
      }
      lambda *= 8.0;
    }
    if (!stepped) break;
  }

  if (cur.defect.norm() > opts.tol) {
    fail(Err::NoConvergence, "defect floor " + std::to_string(cur.defect.norm()) + " after " +
                                 std::to_string(iters) + " iterations");
  }
  if (has_gaps && !cur.inner_ok) {
    fail(Err::NoConvergence, "inner sweep did not settle");
  }

  ShootingResult res;
  res.extremal.trajectory = cur.traj;
  res.extremal.adjoint = cur.adjoint;
  res.extremal.p0 = cur.mult.p0;
  res.extremal.psi = cur.mult.psi;
  res.defect_norm = cur.defect.norm();
  res.iterations = iters;
  res.converged = true;
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    double smin = svd.singularValues().minCoeff();
    res.condition_estimate =
        smin > 0 ? svd.singularValues().maxCoeff() / smin : std::numeric_limits<double>::infinity();
  }
  return res;
}

// ---------------------------------------------------------------------------
// Projected gradient

ProjectedGradientResult projected_gradient(const ControlProblem& pb, const GridFunction& u0,
                                           const Eigen::VectorXd& q_a, double b, int steps,
                                           double step_size, const SimOptions& opts) {
  // The fixed terminal adjoint p(b) = 0 represents the cost gradient only
  // when the boundary map ignores the final state.
  {
    Eigen::VectorXd za = Eigen::VectorXd::Zero(pb.state_dim);
    if (pb.boundary.jac_final(za, za, pb.param_ptr()).norm() > 0) {
      fail(Err::UnsupportedKind, "projected gradient needs a free final state");
    }
  }
  ProjectedGradientResult out;
  GridFunction u = u0;
  Trajectory traj = simulate(pb, u, q_a, b, opts);
  out.cost_history.push_back(traj.total_cost());
  int bad_streak = 0;
  const double p0 = -1.0;
  for (int it = 0; it < steps; ++it) {
    GridFunction p = adjoint_solve(pb, traj, Eigen::VectorXd::Zero(pb.state_dim), p0);
    GridFunction unew = traj.control;
    const auto& grid = traj.grid();
    for (int k = 0; k + 1 < static_cast<int>(grid.size()); ++k) {
      double t = grid[static_cast<size_t>(k)];
      Eigen::VectorXd psig =
          pb.scale.is_right_scattered(t) ? p.values.col(k + 1) : p.values.col(k);
      Eigen::VectorXd g = hamiltonian_grad_control(pb, traj.state.values.col(k),
                                                   traj.control.values.col(k), psig, p0, t);
      unew.values.col(k) = pb.omega.project(traj.control.values.col(k) + step_size * g);
    }
    unew.values.col(unew.size() - 1) = unew.values.col(unew.size() - 2);
    Trajectory cand = simulate(pb, unew, q_a, b, opts);
    double c = cand.total_cost();
    if (c > out.cost_history.back() + 1e-12) {
      ++bad_streak;
      if (bad_streak >= 5) fail(Err::StepTooLarge, "cost increased for 5 consecutive steps");
    } else {
      bad_streak = 0;
    }
    traj = cand;
    u = unew;
    out.cost_history.push_back(c);
  }
  out.control = u;
  return out;
}

}  // namespace tspmp
