#include "tspmp/json_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace tspmp {

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(static_cast<int>(a.size()));
  for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd mat_from_json(const json& rows) {
  int nr = static_cast<int>(rows.size());
  int nc = nr > 0 ? static_cast<int>(rows[0].size()) : 0;
  Eigen::MatrixXd m(nr, nc);
  for (int r = 0; r < nr; ++r) {
    for (int c = 0; c < nc; ++c) m(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
  }
  return m;
}

// Full-precision float text; round-trips exactly.
std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

json to_json(const TimeScale& ts) {
  json segs = json::array();
  for (const auto& s : ts.segments()) segs.push_back(json::array({s.left, s.right}));
  return json{{"segments", segs}};
}

TimeScale timescale_from_json(const json& j) {
  std::vector<std::pair<double, double>> segs;
  for (const auto& s : j.at("segments")) segs.push_back({s.at(0), s.at(1)});
  return TimeScale(segs);
}

json to_json(const GridFunction& f) {
  json values = json::array();
  for (int k = 0; k < f.size(); ++k) values.push_back(vec_to_json(f.values.col(k)));
  return json{{"grid", f.grid}, {"values", values}};
}

GridFunction gridfunction_from_json(const json& j) {
  std::vector<double> grid = j.at("grid").get<std::vector<double>>();
  const json& values = j.at("values");
  if (values.size() != grid.size()) fail(Err::ParseError, "values length mismatch");
  int dim = grid.empty() ? 0 : static_cast<int>(values[0].size());
  Eigen::MatrixXd m(dim, static_cast<int>(grid.size()));
  for (size_t k = 0; k < grid.size(); ++k) m.col(static_cast<int>(k)) = vec_from_json(values[k]);
  return GridFunction(grid, m);
}

json to_json(const ConstraintSet& s) {
  json p;
  switch (s.kind()) {
    case OmegaKind::FullSpace:
      return json{{"kind", "full_space"}, {"params", {{"dim", s.dim()}}}};
    case OmegaKind::Singleton:
      return json{{"kind", "singleton"}, {"params", {{"point", vec_to_json(s.point)}}}};
    case OmegaKind::Box:
      return json{{"kind", "box"},
                  {"params", {{"lo", vec_to_json(s.lo)}, {"hi", vec_to_json(s.hi)}}}};
    case OmegaKind::Ball:
      return json{{"kind", "ball"},
                  {"params", {{"center", vec_to_json(s.center)}, {"radius", s.radius}}}};
    case OmegaKind::Halfspaces:
      return json{{"kind", "halfspaces"},
                  {"params",
                   {{"normals", mat_to_json(s.normals)}, {"offsets", vec_to_json(s.offsets)}}}};
    case OmegaKind::FiniteSet: {
      json pts = json::array();
      for (const auto& v : s.points) pts.push_back(vec_to_json(v));
      return json{{"kind", "finite_set"}, {"params", {{"points", pts}}}};
    }
    case OmegaKind::AbsCone:
      return json{{"kind", "abs_cone"}, {"params", json::object()}};
    case OmegaKind::ParabolaHypograph:
      return json{{"kind", "parabola_hypograph"}, {"params", json::object()}};
    case OmegaKind::QuarterDisc:
      return json{{"kind", "quarter_disc"}, {"params", json::object()}};
    case OmegaKind::LineFan:
      return json{{"kind", "line_fan"}, {"params", {{"max_level", s.max_level}}}};
  }
  fail(Err::ParseError, "unknown constraint kind");
}

ConstraintSet constraint_from_json(const json& j) {
  std::string kind = j.at("kind");
  const json& p = j.value("params", json::object());
  if (kind == "full_space") return ConstraintSet::full_space(p.at("dim"));
  if (kind == "singleton") return ConstraintSet::singleton(vec_from_json(p.at("point")));
  if (kind == "box")
    return ConstraintSet::box(vec_from_json(p.at("lo")), vec_from_json(p.at("hi")));
  if (kind == "ball") return ConstraintSet::ball(vec_from_json(p.at("center")), p.at("radius"));
  if (kind == "halfspaces")
    return ConstraintSet::halfspaces(mat_from_json(p.at("normals")),
                                     vec_from_json(p.at("offsets")));
  if (kind == "finite_set") {
    std::vector<Eigen::VectorXd> pts;
    for (const auto& v : p.at("points")) pts.push_back(vec_from_json(v));
    return ConstraintSet::finite_set(pts);
  }
  if (kind == "abs_cone") return ConstraintSet::abs_cone();
  if (kind == "parabola_hypograph") return ConstraintSet::parabola_hypograph();
  if (kind == "quarter_disc") return ConstraintSet::quarter_disc();
  if (kind == "line_fan") return ConstraintSet::line_fan(p.value("max_level", 60));
  fail(Err::ParseError, "unknown constraint kind '" + kind + "'");
}

json to_json(const ConvexTarget& t) {
  switch (t.kind()) {
    case TargetKind::Point:
      return json{{"kind", "point"}, {"params", {{"point", vec_to_json(t.base)}}}};
    case TargetKind::AffineSubspace:
      return json{{"kind", "affine_subspace"},
                  {"params", {{"base", vec_to_json(t.base)}, {"dirs", mat_to_json(t.dirs)}}}};
    case TargetKind::Box:
      return json{{"kind", "box"},
                  {"params", {{"lo", vec_to_json(t.lo)}, {"hi", vec_to_json(t.hi)}}}};
    case TargetKind::Ball:
      return json{{"kind", "ball"},
                  {"params", {{"center", vec_to_json(t.center)}, {"radius", t.radius}}}};
    case TargetKind::Halfspaces:
      return json{{"kind", "halfspaces"},
                  {"params",
                   {{"normals", mat_to_json(t.normals)}, {"offsets", vec_to_json(t.offsets)}}}};
  }
  fail(Err::ParseError, "unknown target kind");
}

ConvexTarget target_from_json(const json& j) {
  std::string kind = j.at("kind");
  const json& p = j.value("params", json::object());
  if (kind == "point") return ConvexTarget::point(vec_from_json(p.at("point")));
  if (kind == "affine_subspace")
    return ConvexTarget::affine_subspace(vec_from_json(p.at("base")), mat_from_json(p.at("dirs")));
  if (kind == "box") return ConvexTarget::box(vec_from_json(p.at("lo")), vec_from_json(p.at("hi")));
  if (kind == "ball") return ConvexTarget::ball(vec_from_json(p.at("center")), p.at("radius"));
  if (kind == "halfspaces")
    return ConvexTarget::halfspaces(mat_from_json(p.at("normals")),
                                    vec_from_json(p.at("offsets")));
  fail(Err::ParseError, "unknown target kind '" + kind + "'");
}

json to_json(const Expr& e) {
  switch (e.op()) {
    case Expr::Op::Const:
      return json{{"const", e.constant_value()}};
    case Expr::Op::Var: {
      const char* name = "";
      switch (e.var_kind()) {
        case VarKind::State: name = "q"; break;
        case VarKind::Control: name = "u"; break;
        case VarKind::Time: name = "t"; break;
        case VarKind::Param: name = "lambda"; break;
        case VarKind::InitState: name = "qa"; break;
        case VarKind::FinalState: name = "qb"; break;
      }
      if (e.var_kind() == VarKind::Time) return json{{"var", name}};
      return json{{"var", name}, {"index", e.var_index()}};
    }
    case Expr::Op::Pow:
      return json{{"op", "pow"}, {"base", to_json(e.args()[0])}, {"exp", e.exponent()}};
    default: {
      const char* op = "";
      switch (e.op()) {
        case Expr::Op::Add: op = "add"; break;
        case Expr::Op::Sub: op = "sub"; break;
        case Expr::Op::Mul: op = "mul"; break;
        case Expr::Op::Div: op = "div"; break;
        case Expr::Op::Neg: op = "neg"; break;
        case Expr::Op::Exp: op = "exp"; break;
        case Expr::Op::Log: op = "log"; break;
        case Expr::Op::Sin: op = "sin"; break;
        case Expr::Op::Cos: op = "cos"; break;
        default: break;
      }
      json args = json::array();
      for (const auto& a : e.args()) args.push_back(to_json(a));
      return json{{"op", op}, {"args", args}};
    }
  }
}

Expr expr_from_json(const json& j) {
  if (j.contains("const")) return Expr::constant(j.at("const").get<double>());
  if (j.contains("var")) {
    std::string v = j.at("var");
    int idx = j.value("index", 0);
    if (v == "q") return state(idx);
    if (v == "u") return control(idx);
    if (v == "t") return time_var();
    if (v == "lambda") return param(idx);
    if (v == "qa") return init_state(idx);
    if (v == "qb") return final_state(idx);
    fail(Err::ParseError, "unknown variable '" + v + "'");
  }
  std::string op = j.at("op");
  if (op == "pow") return pow_int(expr_from_json(j.at("base")), j.at("exp").get<int>());
  std::vector<Expr> args;
  for (const auto& a : j.at("args")) args.push_back(expr_from_json(a));
  if (op == "add") return args.at(0) + args.at(1);
  if (op == "sub") return args.at(0) - args.at(1);
  if (op == "mul") return args.at(0) * args.at(1);
  if (op == "div") return args.at(0) / args.at(1);
  if (op == "neg") return -args.at(0);
  if (op == "exp") return exp(args.at(0));
  if (op == "log") return log(args.at(0));
  if (op == "sin") return sin(args.at(0));
  if (op == "cos") return cos(args.at(0));
  fail(Err::ParseError, "unknown operation '" + op + "'");
}

json to_json(const ControlProblem& pb) {
  json dyn = json::array();
  for (const auto& r : pb.dynamics.rows()) dyn.push_back(to_json(r));
  json bnd = json::array();
  for (const auto& r : pb.boundary.rows()) bnd.push_back(to_json(r));
  json out{{"schema", "tspmp/1"},
           {"name", pb.name},
           {"state_dim", pb.state_dim},
           {"control_dim", pb.control_dim},
           {"boundary_dim", pb.boundary_dim},
           {"timescale", to_json(pb.scale)},
           {"dynamics", dyn},
           {"running_cost", to_json(pb.running_cost.body())},
           {"boundary", bnd},
           {"omega", to_json(pb.omega)},
           {"target", to_json(pb.target)},
           {"final_time",
            {{"mode", pb.final_time_mode == FinalTimeMode::Free ? "free" : "fixed"},
             {"b", pb.final_time}}}};
  if (pb.parameter) out["parameter"] = vec_to_json(*pb.parameter);
  return out;
}

ControlProblem problem_from_json(const json& j) {
  if (j.contains("builtin")) return make_builtin(j.at("builtin").get<std::string>());
  ControlProblem pb;
  pb.name = j.value("name", "custom");
  pb.state_dim = j.at("state_dim");
  pb.control_dim = j.at("control_dim");
  pb.boundary_dim = j.at("boundary_dim");
  pb.scale = timescale_from_json(j.at("timescale"));
  int pd = 0;
  if (j.contains("parameter")) {
    pb.parameter = vec_from_json(j.at("parameter"));
    pd = static_cast<int>(pb.parameter->size());
  }
  std::vector<Expr> dyn;
  for (const auto& r : j.at("dynamics")) dyn.push_back(expr_from_json(r));
  pb.dynamics = VectorField(pb.state_dim, pb.control_dim, pd, dyn);
  pb.running_cost =
      ScalarField(pb.state_dim, pb.control_dim, pd, expr_from_json(j.at("running_cost")));
  std::vector<Expr> bnd;
  for (const auto& r : j.at("boundary")) bnd.push_back(expr_from_json(r));
  pb.boundary = BoundaryMap(pb.boundary_dim, pb.state_dim, pd, bnd);
  pb.omega = constraint_from_json(j.at("omega"));
  pb.target = target_from_json(j.at("target"));
  const json& ft = j.at("final_time");
  pb.final_time_mode =
      ft.at("mode").get<std::string>() == "free" ? FinalTimeMode::Free : FinalTimeMode::Fixed;
  pb.final_time = ft.at("b");
  return pb;
}

json to_json(const Trajectory& traj) {
  return json{{"state", to_json(traj.state)},
              {"cost", to_json(traj.cost)},
              {"control", to_json(traj.control)},
              {"start_time", traj.start_time},
              {"final_time", traj.final_time}};
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory t;
  t.state = gridfunction_from_json(j.at("state"));
  t.cost = gridfunction_from_json(j.at("cost"));
  t.control = gridfunction_from_json(j.at("control"));
  t.start_time = j.at("start_time");
  t.final_time = j.at("final_time");
  return t;
}

json to_json(const Extremal& ex) {
  return json{{"trajectory", to_json(ex.trajectory)},
              {"adjoint", to_json(ex.adjoint)},
              {"p0", ex.p0},
              {"psi", vec_to_json(ex.psi)}};
}

Extremal extremal_from_json(const json& j) {
  Extremal ex;
  ex.trajectory = trajectory_from_json(j.at("trajectory"));
  ex.adjoint = gridfunction_from_json(j.at("adjoint"));
  ex.p0 = j.at("p0");
  ex.psi = vec_from_json(j.at("psi"));
  return ex;
}

json to_json(const PMPReport& rep) {
  json rs = json::array();
  for (const auto& r : rep.rs) {
    rs.push_back(json{{"r", r.r},
                      {"residuals", r.residuals},
                      {"worst_residual", r.worst_residual},
                      {"pass", r.pass},
                      {"h_at_control", r.h_at_control},
                      {"max_hamiltonian", r.max_hamiltonian},
                      {"maximization_holds", r.maximization_holds},
                      {"maximization_failure_expected", !r.maximization_holds},
                      {"opp_min_hamiltonian", r.opp_min_hamiltonian}});
  }
  json rd = json::array();
  for (const auto& r : rep.rd) {
    rd.push_back(json{{"s", r.s}, {"gap", r.gap}, {"pass", r.pass}});
  }
  json out{{"schema", "tspmp/1"},
           {"tol_pmp", rep.tol_pmp},
           {"tol_nontrivial", rep.tol_nontrivial},
           {"multiplier_scale", rep.multiplier_scale},
           {"nontrivial", rep.nontrivial},
           {"rs_conditions", rs},
           {"rs_pass", rep.rs_pass},
           {"rd_conditions", rd},
           {"rd_pass", rep.rd_pass},
           {"worst_rd_gap", rep.worst_rd_gap},
           {"worst_rd_time", rep.worst_rd_time},
           {"transversality",
            {{"init_defect", rep.transversality.init_defect},
             {"final_defect", rep.transversality.final_defect},
             {"ortho_ok", rep.transversality.ortho_ok},
             {"target_distance", rep.transversality.target_distance},
             {"boundary_value", vec_to_json(rep.transversality.boundary_value)}}},
           {"transversality_pass", rep.transversality_pass},
           {"free_time",
            {{"applicable", rep.free_time.applicable},
             {"value", rep.free_time.value},
             {"pass", rep.free_time.pass}}},
           {"averaged_hamiltonian",
            {{"applicable", rep.averaged_hamiltonian.applicable},
             {"value", rep.averaged_hamiltonian.value},
             {"pass", rep.averaged_hamiltonian.pass}}},
           {"parameter",
            {{"applicable", rep.parameter.applicable},
             {"defect", rep.parameter.applicable ? vec_to_json(rep.parameter.defect)
                                                 : json::array()},
             {"pass", rep.parameter.pass}}},
           {"final_time_max_hamiltonian", rep.final_time_max_hamiltonian},
           {"overall_pass", rep.overall_pass},
           {"exit_code", rep.exit_code()}};
  if (!rep.note.empty()) out["note"] = rep.note;
  return out;
}

void write_gridfunction_csv(std::ostream& os, const TimeScale& ts, const GridFunction& f) {
  os << "t,class";
  for (int i = 0; i < f.dim(); ++i) os << ",v" << i;
  os << "\n";
  for (int k = 0; k < f.size(); ++k) {
    double t = f.grid[static_cast<size_t>(k)];
    os << fmt_double(t) << "," << (ts.is_right_scattered(t) ? "RS" : "RD");
    for (int i = 0; i < f.dim(); ++i) os << "," << fmt_double(f.values(i, k));
    os << "\n";
  }
}

GridFunction read_gridfunction_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) fail(Err::ParseError, "empty CSV");
  int dim = -1;  // columns after t,class
  std::vector<double> grid;
  std::vector<double> flat;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 2) fail(Err::ParseError, "short CSV row");
    if (dim < 0) dim = static_cast<int>(cells.size()) - 2;
    grid.push_back(std::stod(cells[0]));
    for (int i = 0; i < dim; ++i) flat.push_back(std::stod(cells[static_cast<size_t>(i) + 2]));
  }
  Eigen::MatrixXd m(dim, static_cast<int>(grid.size()));
  for (size_t k = 0; k < grid.size(); ++k) {
    for (int i = 0; i < dim; ++i) m(i, static_cast<int>(k)) = flat[k * dim + i];
  }
  return GridFunction(grid, m);
}

void write_trajectory_csv(std::ostream& os, const TimeScale& ts, const Trajectory& traj) {
  os << "t,class";
  for (int i = 0; i < traj.state.dim(); ++i) os << ",q" << i;
  for (int i = 0; i < traj.control.dim(); ++i) os << ",u" << i;
  os << ",cost\n";
  for (int k = 0; k < traj.state.size(); ++k) {
    double t = traj.state.grid[static_cast<size_t>(k)];
    os << fmt_double(t) << "," << (ts.is_right_scattered(t) ? "RS" : "RD");
    for (int i = 0; i < traj.state.dim(); ++i) os << "," << fmt_double(traj.state.values(i, k));
    for (int i = 0; i < traj.control.dim(); ++i)
      os << "," << fmt_double(traj.control.values(i, k));
    os << "," << fmt_double(traj.cost.values(0, k)) << "\n";
  }
}

void write_fd_check_csv(std::ostream& os, const std::vector<std::pair<double, double>>& rows) {
  os << "size,sup_error\n";
  for (const auto& [a, e] : rows) os << fmt_double(a) << "," << fmt_double(e) << "\n";
}

}  // namespace tspmp
