#include "tspmp/registry.hpp"

#include <cmath>

namespace tspmp {

namespace {

Eigen::VectorXd vec1(double a) { return Eigen::VectorXd::Constant(1, a); }

Eigen::VectorXd vecn(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ControlProblem make_ex00() {
  ControlProblem pb;
  pb.name = "ex00";
  pb.state_dim = 1;
  pb.control_dim = 1;
  pb.boundary_dim = 2;
  pb.scale = integer_scale(0, 3);
  pb.dynamics = VectorField(1, 1, 0, {control(0)});
  pb.running_cost = ScalarField(1, 1, 0, lit(1.0));
  pb.boundary = BoundaryMap(2, 1, 0, {init_state(0), final_state(0)});
  pb.target = ConvexTarget::point(vecn({0.0, 1.5}));
  pb.omega = ConstraintSet::box(vec1(0.0), vec1(1.0));
  pb.final_time_mode = FinalTimeMode::Free;
  pb.final_time = 2.0;
  return pb;
}

ControlProblem make_ex0() {
  ControlProblem pb;
  pb.name = "ex0";
  pb.state_dim = 1;
  pb.control_dim = 1;
  pb.boundary_dim = 1;
  pb.scale = integer_scale(0, 2);
  pb.dynamics = VectorField(1, 1, 0, {control(0) - state(0)});
  pb.running_cost = ScalarField(1, 1, 0, lit(2.0) * pow_int(state(0), 2) - pow_int(control(0), 2));
  pb.boundary = BoundaryMap(1, 1, 0, {init_state(0)});
  pb.target = ConvexTarget::point(vec1(0.0));
  pb.omega = ConstraintSet::box(vec1(0.0), vec1(1.0));
  pb.final_time_mode = FinalTimeMode::Fixed;
  pb.final_time = 2.0;
  return pb;
}

ControlProblem make_ex000() {
  ControlProblem pb;
  pb.name = "ex000";
  pb.state_dim = 1;
  pb.control_dim = 1;
  pb.boundary_dim = 1;
  pb.scale = integer_scale(0, 2);
  pb.dynamics = VectorField(1, 1, 0, {control(0) - state(0)});
  pb.running_cost =
      ScalarField(1, 1, 0, (pow_int(control(0), 2) - pow_int(state(0), 2)) / lit(2.0));
  pb.boundary = BoundaryMap(1, 1, 0, {init_state(0)});
  pb.target = ConvexTarget::point(vec1(1.0));
  pb.omega = ConstraintSet::box(vec1(0.0), vec1(1.0));
  pb.final_time_mode = FinalTimeMode::Fixed;
  pb.final_time = 2.0;
  return pb;
}

ControlProblem make_lqr1d() {
  ControlProblem pb;
  pb.name = "lqr1d";
  pb.state_dim = 1;
  pb.control_dim = 1;
  pb.boundary_dim = 1;
  pb.scale = TimeScale({{0.0, 1.0}});
  pb.dynamics = VectorField(1, 1, 0, {control(0)});
  pb.running_cost =
      ScalarField(1, 1, 0, (pow_int(state(0), 2) + pow_int(control(0), 2)) / lit(2.0));
  pb.boundary = BoundaryMap(1, 1, 0, {init_state(0)});
  pb.target = ConvexTarget::point(vec1(1.0));
  pb.omega = ConstraintSet::box(vec1(-10.0), vec1(10.0));
  pb.final_time_mode = FinalTimeMode::Fixed;
  pb.final_time = 1.0;
  return pb;
}

ControlProblem make_hybrid_demo() {
  ControlProblem pb;
  pb.name = "hybrid_demo";
  pb.state_dim = 1;
  pb.control_dim = 1;
  pb.boundary_dim = 1;
  pb.scale = TimeScale({{0.0, 1.0}, {1.5, 1.5}, {2.0, 2.0}, {2.5, 3.0}});
  pb.dynamics = VectorField(1, 1, 0, {control(0) - state(0)});
  pb.running_cost =
      ScalarField(1, 1, 0, (pow_int(state(0), 2) + pow_int(control(0), 2)) / lit(2.0));
  pb.boundary = BoundaryMap(1, 1, 0, {init_state(0)});
  pb.target = ConvexTarget::point(vec1(1.0));
  pb.omega = ConstraintSet::box(vec1(-5.0), vec1(5.0));
  pb.final_time_mode = FinalTimeMode::Fixed;
  pb.final_time = 3.0;
  return pb;
}

ControlProblem make_dblint() {
  ControlProblem pb;
  pb.name = "dblint";
  pb.state_dim = 2;
  pb.control_dim = 1;
  pb.boundary_dim = 4;
  pb.scale = TimeScale({{0.0, 2.5}});
  pb.dynamics = VectorField(2, 1, 0, {state(1), control(0)});
  pb.running_cost = ScalarField(2, 1, 0, lit(1.0));
  pb.boundary = BoundaryMap(4, 2, 0, {init_state(0), init_state(1), final_state(0), final_state(1)});
  pb.target = ConvexTarget::point(vecn({-1.0, 0.0, 0.0, 0.0}));
  pb.omega = ConstraintSet::box(vec1(-1.0), vec1(1.0));
  pb.final_time_mode = FinalTimeMode::Free;
  pb.final_time = 2.0;
  return pb;
}

// The double integrator after the affine change of variable onto [0,1]; the
// original horizon enters as a multiplicative parameter.
ControlProblem make_dblint_rescaled() {
  ControlProblem pb;
  pb.name = "dblint_rescaled";
  pb.state_dim = 2;
  pb.control_dim = 1;
  pb.boundary_dim = 4;
  pb.scale = TimeScale({{0.0, 1.0}});
  pb.dynamics = VectorField(2, 1, 1, {param(0) * state(1), param(0) * control(0)});
  pb.running_cost = ScalarField(2, 1, 1, param(0));
  pb.boundary =
      BoundaryMap(4, 2, 1, {init_state(0), init_state(1), final_state(0), final_state(1)});
  pb.target = ConvexTarget::point(vecn({-1.0, 0.0, 0.0, 0.0}));
  pb.omega = ConstraintSet::box(vec1(-1.0), vec1(1.0));
  pb.final_time_mode = FinalTimeMode::Fixed;
  pb.final_time = 1.0;
  pb.parameter = vec1(2.0);
  return pb;
}

ControlProblem make_free_time_demo() {
  ControlProblem pb;
  pb.name = "free_time_demo";
  pb.state_dim = 1;
  pb.control_dim = 1;
  pb.boundary_dim = 2;
  pb.scale = TimeScale({{0.0, 2.0}});
  pb.dynamics = VectorField(1, 1, 0, {control(0)});
  pb.running_cost = ScalarField(1, 1, 0, (lit(1.0) + pow_int(control(0), 2)) / lit(2.0));
  pb.boundary = BoundaryMap(2, 1, 0, {init_state(0), final_state(0)});
  pb.target = ConvexTarget::point(vecn({0.0, 1.0}));
  pb.omega = ConstraintSet::box(vec1(-4.0), vec1(4.0));
  pb.final_time_mode = FinalTimeMode::Free;
  pb.final_time = 0.8;
  return pb;
}

GridFunction grid_fn(const std::vector<double>& grid,
                     const std::function<Eigen::VectorXd(double)>& fn) {
  return GridFunction::sampled(grid, fn);
}

Extremal discrete_extremal(const ControlProblem& pb, double b,
                           const std::vector<Eigen::VectorXd>& controls,
                           const std::vector<Eigen::VectorXd>& states,
                           const std::vector<double>& costs,
                           const std::vector<Eigen::VectorXd>& adjoints, double p0,
                           const Eigen::VectorXd& psi) {
  std::vector<double> grid = pb.scale.sample_grid(pb.scale.min_time(), b, 1.0);
  Extremal ex;
  Eigen::MatrixXd us(pb.control_dim, grid.size());
  Eigen::MatrixXd qs(pb.state_dim, grid.size());
  Eigen::MatrixXd cs(1, grid.size());
  Eigen::MatrixXd ps(pb.state_dim, grid.size());
  for (size_t k = 0; k < grid.size(); ++k) {
    us.col(static_cast<int>(k)) = controls[std::min(k, controls.size() - 1)];
    qs.col(static_cast<int>(k)) = states[k];
    cs(0, static_cast<int>(k)) = costs[k];
    ps.col(static_cast<int>(k)) = adjoints[k];
  }
  ex.trajectory.state = GridFunction(grid, qs);
  ex.trajectory.cost = GridFunction(grid, cs);
  ex.trajectory.control = GridFunction(grid, us);
  ex.trajectory.start_time = grid.front();
  ex.trajectory.final_time = grid.back();
  ex.adjoint = GridFunction(grid, ps);
  ex.p0 = p0;
  ex.psi = psi;
  return ex;
}

}  // namespace

ControlProblem make_builtin(const std::string& name) {
  if (name == "ex00") return make_ex00();
  if (name == "ex0") return make_ex0();
  if (name == "ex000") return make_ex000();
  if (name == "lqr1d") return make_lqr1d();
  if (name == "hybrid_demo") return make_hybrid_demo();
  if (name == "dblint") return make_dblint();
  if (name == "dblint_rescaled") return make_dblint_rescaled();
  if (name == "free_time_demo") return make_free_time_demo();
  fail(Err::ParseError, "unknown builtin problem '" + name + "'");
}

std::vector<std::string> builtin_names() {
  return {"ex00", "ex0", "ex000", "lqr1d", "hybrid_demo", "dblint", "dblint_rescaled",
          "free_time_demo"};
}

std::optional<Extremal> reference_extremal(const std::string& name, double h) {
  if (name == "ex00") {
    ControlProblem pb = make_ex00();
    return discrete_extremal(pb, 2.0, {vec1(0.5), vec1(1.0)},
                             {vec1(0.0), vec1(0.5), vec1(1.5)}, {0.0, 1.0, 2.0},
                             {vec1(0.0), vec1(0.0), vec1(0.0)}, -1.0, vecn({0.0, 0.0}));
  }
  if (name == "ex0") {
    ControlProblem pb = make_ex0();
    return discrete_extremal(pb, 2.0, {vec1(0.0), vec1(1.0)},
                             {vec1(0.0), vec1(0.0), vec1(1.0)}, {0.0, 0.0, -1.0},
                             {vec1(0.0), vec1(0.0), vec1(0.0)}, -1.0, vec1(0.0));
  }
  if (name == "ex000") {
    ControlProblem pb = make_ex000();
    return discrete_extremal(pb, 2.0, {vec1(0.0), vec1(0.0)},
                             {vec1(1.0), vec1(0.0), vec1(0.0)}, {0.0, -0.5, -0.5},
                             {vec1(1.0), vec1(0.0), vec1(0.0)}, -1.0, vec1(-1.0));
  }
  if (name == "lqr1d") {
    ControlProblem pb = make_lqr1d();
    std::vector<double> grid = pb.scale.sample_grid(0.0, 1.0, h);
    const double ch1 = std::cosh(1.0);
    Extremal ex;
    ex.trajectory.state =
        grid_fn(grid, [&](double t) { return vec1(std::cosh(1.0 - t) / ch1); });
    ex.trajectory.control =
        grid_fn(grid, [&](double t) { return vec1(-std::sinh(1.0 - t) / ch1); });
    ex.trajectory.cost = grid_fn(grid, [&](double t) {
      return vec1((std::sinh(2.0) - std::sinh(2.0 * (1.0 - t))) / (4.0 * ch1 * ch1));
    });
    ex.trajectory.start_time = 0.0;
    ex.trajectory.final_time = 1.0;
    ex.adjoint = ex.trajectory.control;  // the maximizer coincides with the adjoint here
    ex.p0 = -1.0;
    ex.psi = vec1(std::tanh(1.0));
    return ex;
  }
  if (name == "dblint") {
    ControlProblem pb = make_dblint();
    std::vector<double> grid = pb.scale.sample_grid(0.0, 2.0, h);
    Extremal ex;
    ex.trajectory.state = grid_fn(grid, [&](double t) {
      if (t <= 1.0) return vecn({-1.0 + 0.5 * t * t, t});
      double s = t - 1.0;
      return vecn({-0.5 + s - 0.5 * s * s, 2.0 - t});
    });
    ex.trajectory.control =
        grid_fn(grid, [&](double t) { return vec1(t < 1.0 ? 1.0 : -1.0); });
    ex.trajectory.cost = grid_fn(grid, [&](double t) { return vec1(t); });
    ex.trajectory.start_time = 0.0;
    ex.trajectory.final_time = 2.0;
    ex.adjoint = grid_fn(grid, [&](double t) { return vecn({1.0, 1.0 - t}); });
    ex.p0 = -1.0;
    ex.psi = vecn({-1.0, -1.0, 1.0, -1.0});
    return ex;
  }
  if (name == "dblint_rescaled") {
    ControlProblem pb = make_dblint_rescaled();
    std::vector<double> grid = pb.scale.sample_grid(0.0, 1.0, h);
    const double horizon = 2.0;
    Extremal ex;
    auto orig = [&](double tt) { return horizon * tt; };
    ex.trajectory.state = grid_fn(grid, [&](double tt) {
      double t = orig(tt);
      if (t <= 1.0) return vecn({-1.0 + 0.5 * t * t, t});
      double s = t - 1.0;
      return vecn({-0.5 + s - 0.5 * s * s, 2.0 - t});
    });
    ex.trajectory.control =
        grid_fn(grid, [&](double tt) { return vec1(orig(tt) < 1.0 ? 1.0 : -1.0); });
    ex.trajectory.cost = grid_fn(grid, [&](double tt) { return vec1(orig(tt)); });
    ex.trajectory.start_time = 0.0;
    ex.trajectory.final_time = 1.0;
    ex.adjoint = grid_fn(grid, [&](double tt) { return vecn({1.0, 1.0 - orig(tt)}); });
    ex.p0 = -1.0;
    ex.psi = vecn({-1.0, -1.0, 1.0, -1.0});
    return ex;
  }
  if (name == "free_time_demo") {
    ControlProblem pb = make_free_time_demo();
    std::vector<double> grid = pb.scale.sample_grid(0.0, 1.0, h);
    Extremal ex;
    ex.trajectory.state = grid_fn(grid, [&](double t) { return vec1(t); });
    ex.trajectory.control = grid_fn(grid, [&](double) { return vec1(1.0); });
    ex.trajectory.cost = grid_fn(grid, [&](double t) { return vec1(t); });
    ex.trajectory.start_time = 0.0;
    ex.trajectory.final_time = 1.0;
    ex.adjoint = grid_fn(grid, [&](double) { return vec1(1.0); });
    ex.p0 = -1.0;
    ex.psi = vecn({-1.0, 1.0});
    return ex;
  }
  return std::nullopt;
}

}  // namespace tspmp
