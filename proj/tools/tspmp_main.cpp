// Command-line front-end: load problems, run simulate/certify/solve/oracle/
// examples/fdcheck, and emit JSON/CSV artifacts.
//
// Exit codes: 0 success (all applicable optimality conditions pass for
// certify), 1 configuration error, 2 condition violation, 3 no applicable
// condition, 4 solver failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tspmp/json_io.hpp"
#include "tspmp/solver.hpp"
#include "tspmp/variation.hpp"

namespace fs = std::filesystem;
using namespace tspmp;

namespace {

int log_level() {
  const char* v = std::getenv("TSPMP_LOG");
  return v ? std::atoi(v) : 0;
}

void log_info(const std::string& msg) {
  if (log_level() > 0) std::cerr << "[tspmp] " << msg << "\n";
}

struct CommonArgs {
  std::string builtin;
  std::string problem_path;
  std::string out_dir = ".";
  double h = 1e-3;
  double tol_pmp = 1e-6;
  unsigned seed = 0;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonArgs& args, bool need_problem = true) {
  if (need_problem) {
    cmd->add_option("--builtin", args.builtin, "builtin problem name");
    cmd->add_option("--problem", args.problem_path, "problem JSON path");
  }
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--h", args.h, "dense-segment step");
  cmd->add_option("--tol-pmp", args.tol_pmp, "condition tolerance");
  cmd->add_option("--seed", args.seed, "random seed");
  cmd->add_option("--format", args.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
}

ControlProblem load_problem(const CommonArgs& args) {
  if (!args.builtin.empty()) return make_builtin(args.builtin);
  if (args.problem_path.empty()) fail(Err::ParseError, "need --builtin or --problem");
  std::ifstream in(args.problem_path);
  if (!in) fail(Err::ParseError, "cannot open " + args.problem_path);
  json j = json::parse(in);
  return problem_from_json(j);
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  out << text;
  log_info("wrote " + path.string());
}

Extremal load_extremal(const ControlProblem& pb, const std::string& spec, double h) {
  if (spec == "paper" || spec == "reference" || spec.empty()) {
    auto ref = reference_extremal(pb.name, h);
    if (!ref) fail(Err::ParseError, "no reference extremal for problem '" + pb.name + "'");
    return *ref;
  }
  std::ifstream in(spec);
  if (!in) fail(Err::ParseError, "cannot open " + spec);
  return extremal_from_json(json::parse(in));
}

int run_simulate(const CommonArgs& args, const std::string& control_path) {
  ControlProblem pb = load_problem(args);
  SimOptions opts;
  opts.h = args.h;
  GridFunction u;
  Eigen::VectorXd q_a;
  double b = pb.final_time;
  if (!control_path.empty()) {
    std::ifstream in(control_path);
    if (!in) fail(Err::ParseError, "cannot open " + control_path);
    u = gridfunction_from_json(json::parse(in));
    q_a = Eigen::VectorXd::Zero(pb.state_dim);
  } else {
    auto ref = reference_extremal(pb.name, args.h);
    if (!ref) fail(Err::ParseError, "no reference control; pass --control");
    u = ref->trajectory.control;
    q_a = ref->trajectory.initial_state();
    b = ref->trajectory.final_time;
  }
  Trajectory traj = simulate(pb, u, q_a, b, opts);
  fs::path dir(args.out_dir);
  if (args.format == "csv") {
    std::ostringstream os;
    write_trajectory_csv(os, pb.scale, traj);
    write_file(dir / (pb.name + "_trajectory.csv"), os.str());
  } else {
    write_file(dir / (pb.name + "_trajectory.json"), to_json(traj).dump(2) + "\n");
  }
  std::cout << "simulated " << pb.name << " on [" << traj.start_time << "," << traj.final_time
            << "], cost " << traj.total_cost() << "\n";
  return 0;
}

int run_certify(const CommonArgs& args, const std::string& extremal_spec) {
  ControlProblem pb = load_problem(args);
  Extremal ex = load_extremal(pb, extremal_spec, args.h);
  CertifyOptions opts;
  opts.tol_pmp = args.tol_pmp;
  opts.maximize.seed = args.seed;
  PMPReport rep = certify(pb, ex, opts);
  write_file(fs::path(args.out_dir) / (pb.name + "_report.json"), to_json(rep).dump(2) + "\n");
  std::cout << "certify " << pb.name << ": " << (rep.overall_pass ? "PASS" : "FAIL") << "\n";
  for (const auto& r : rep.rs) {
    std::cout << "  gap point t=" << r.r << " worst residual " << r.worst_residual
              << (r.pass ? " (ok)" : " (violated)");
    if (!r.maximization_holds) {
      std::cout << " [max N/A at gap points: max H " << r.max_hamiltonian << " vs "
                << r.h_at_control << ", expected]";
    }
    std::cout << "\n";
  }
  if (!rep.rd.empty()) {
    std::cout << "  dense points: worst gap " << rep.worst_rd_gap << " at t=" << rep.worst_rd_time
              << (rep.rd_pass ? " (ok)" : " (violated)") << "\n";
  }
  std::cout << "  transversality defects " << rep.transversality.init_defect << ", "
            << rep.transversality.final_defect
            << (rep.transversality_pass ? " (ok)" : " (violated)") << "\n";
  if (rep.free_time.applicable) {
    std::cout << "  free-time max H " << rep.free_time.value
              << (rep.free_time.pass ? " (ok)" : " (violated)") << "\n";
  }
  if (!rep.note.empty()) std::cout << "  note: " << rep.note << "\n";
  return rep.exit_code();
}

int run_solve(const CommonArgs& args) {
  ControlProblem pb = load_problem(args);
  ShootingOptions opts;
  opts.sim.h = args.h;
  opts.maximize.seed = args.seed;
  ShootingGuess guess;
  guess.psi = Eigen::VectorXd::Zero(pb.boundary_dim);
  try {
    ShootingResult res = shooting_solve(pb, guess, opts);
    CertifyOptions copts;
    copts.tol_pmp = args.tol_pmp;
    PMPReport rep = certify(pb, res.extremal, copts);
    json bundle{{"schema", "tspmp/1"},
                {"extremal", to_json(res.extremal)},
                {"certificate", to_json(rep)},
                {"defect_norm", res.defect_norm},
                {"iterations", res.iterations},
                {"condition_estimate", res.condition_estimate}};
    write_file(fs::path(args.out_dir) / (pb.name + "_solution.json"), bundle.dump(2) + "\n");
    std::cout << "solve " << pb.name << ": defect " << res.defect_norm << " after "
              << res.iterations << " iterations, cost " << res.extremal.trajectory.total_cost()
              << "\n";
    return 0;
  } catch (const Error& e) {
    if (e.code() == Err::NoConvergence || e.code() == Err::MaximizationFailed ||
        e.code() == Err::DegenerateArgmax) {
      std::cerr << "solver failure: " << e.what() << "\n";
      return 4;
    }
    throw;
  }
}

int run_oracle(const CommonArgs& args, int grid_count) {
  ControlProblem pb = load_problem(args);
  if (pb.control_dim != 1 || pb.omega.kind() != OmegaKind::Box) {
    fail(Err::UnsupportedKind, "oracle grids are built for scalar box-constrained controls");
  }
  std::vector<Eigen::VectorXd> candidates;
  for (int k = 0; k < grid_count; ++k) {
    double v = pb.omega.lo[0] + (pb.omega.hi[0] - pb.omega.lo[0]) * k / (grid_count - 1);
    candidates.push_back(Eigen::VectorXd::Constant(1, v));
  }
  Eigen::VectorXd q_a(pb.state_dim);
  auto ref = reference_extremal(pb.name, args.h);
  q_a = ref ? ref->trajectory.initial_state() : Eigen::VectorXd::Zero(pb.state_dim);
  BruteForceResult best = brute_force_discrete(pb, candidates, q_a, pb.final_time);
  json out{{"schema", "tspmp/1"},
           {"problem", pb.name},
           {"grid_count", grid_count},
           {"best_cost", best.cost},
           {"best_control", to_json(best.control)},
           {"admissible_count", best.admissible_count}};
  write_file(fs::path(args.out_dir) / (pb.name + "_oracle.json"), out.dump(2) + "\n");
  std::cout << "oracle " << pb.name << ": best cost " << best.cost << " over "
            << best.admissible_count << " admissible candidates\n";
  return 0;
}

int run_examples(const CommonArgs& args) {
  json summary = json::array();
  std::cout << "example  b*  cost     multipliers (p0, psi)        max H per gap point\n";
  for (const std::string& name : {"ex00", "ex0", "ex000"}) {
    ControlProblem pb = make_builtin(name);
    Extremal ex = *reference_extremal(name);
    CertifyOptions opts;
    opts.tol_pmp = args.tol_pmp;
    PMPReport rep = certify(pb, ex, opts);
    json row{{"example", name},
             {"final_time", ex.trajectory.final_time},
             {"cost", ex.trajectory.total_cost()},
             {"p0", ex.p0},
             {"psi", json::array()},
             {"rs_max_hamiltonian", json::array()},
             {"final_time_max_hamiltonian", rep.final_time_max_hamiltonian},
             {"overall_pass", rep.overall_pass}};
    for (int i = 0; i < ex.psi.size(); ++i) row["psi"].push_back(ex.psi[i]);
    std::ostringstream maxh;
    for (const auto& r : rep.rs) {
      row["rs_max_hamiltonian"].push_back(json{{"r", r.r}, {"max_h", r.max_hamiltonian}});
      maxh << "maxH(" << r.r << ")=" << r.max_hamiltonian << " ";
    }
    summary.push_back(row);
    std::cout << name << "  " << ex.trajectory.final_time << "   " << ex.trajectory.total_cost()
              << "   p0=" << ex.p0 << " psi=" << row["psi"].dump() << "   " << maxh.str() << "\n";
  }
  write_file(fs::path(args.out_dir) / "examples_summary.json", summary.dump(2) + "\n");
  return 0;
}

int run_fdcheck(const CommonArgs& args, const std::string& type, double at, int levels) {
  ControlProblem pb = load_problem(args);
  auto ref = reference_extremal(pb.name, args.h);
  if (!ref) fail(Err::ParseError, "fdcheck needs a problem with a reference extremal");
  SimOptions opts;
  opts.h = args.h;
  const GridFunction& u = ref->trajectory.control;
  Eigen::VectorXd q_a = ref->trajectory.initial_state();
  double b = ref->trajectory.final_time;
  std::vector<std::pair<double, double>> rows;
  if (type == "rs") {
    auto rs = pb.scale.right_scattered_points(ref->trajectory.start_time, b);
    double r = at >= 0 ? at : rs.at(0);
    Eigen::VectorXd y = 0.5 * (pb.omega.lo + pb.omega.hi);
    std::vector<double> alphas;
    for (int k = 0; k < levels; ++k) alphas.push_back(0.5 / (1 << k));
    rows = fd_check_rs(pb, u, q_a, b, r, y, alphas, opts);
  } else if (type == "rd") {
    double s = at >= 0 ? at : ref->trajectory.start_time;
    int ks = ref->trajectory.state.require_index(s);
    double delta = ref->trajectory.grid()[static_cast<size_t>(ks) + 1] - s;
    Eigen::VectorXd z = 0.5 * (pb.omega.lo + pb.omega.hi);
    std::vector<double> betas;
    for (int k = 0; k < levels; ++k) betas.push_back(delta / (1 << k));
    rows = fd_check_rd(pb, u, q_a, b, s, z, betas, opts);
  } else if (type == "init") {
    Eigen::VectorXd dq = Eigen::VectorXd::Ones(pb.state_dim);
    std::vector<double> gammas;
    for (int k = 0; k < levels; ++k) gammas.push_back(0.5 / (1 << k));
    rows = fd_check_init(pb, u, q_a, b, dq, gammas, opts);
  } else {
    fail(Err::ParseError, "fdcheck type must be rs|rd|init");
  }
  std::ostringstream os;
  write_fd_check_csv(os, rows);
  write_file(fs::path(args.out_dir) / (pb.name + "_fdcheck_" + type + ".csv"), os.str());
  for (const auto& [sz, err] : rows) std::cout << "size " << sz << "  sup-error " << err << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal-control toolkit for hybrid discrete/continuous time windows"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string control_path, extremal_spec = "paper", fd_type = "rs";
  double fd_at = -1.0;
  int fd_levels = 4, grid_count = 11;

  CLI::App* sim = app.add_subcommand("simulate", "integrate the dynamics under a control");
  add_common(sim, args);
  sim->add_option("--control", control_path, "control GridFunction JSON");

  CLI::App* cert = app.add_subcommand("certify", "evaluate the optimality conditions");
  add_common(cert, args);
  cert->add_option("--extremal", extremal_spec, "'paper' or extremal JSON path");

  CLI::App* solve = app.add_subcommand("solve", "shooting solve for a candidate extremal");
  add_common(solve, args);

  CLI::App* oracle = app.add_subcommand("oracle", "brute-force search on discrete windows");
  add_common(oracle, args);
  oracle->add_option("--grid-count", grid_count, "control grid points per step");

  CLI::App* examples = app.add_subcommand("examples", "replay the built-in worked examples");
  add_common(examples, args, false);

  CLI::App* fd = app.add_subcommand("fdcheck", "finite-difference variation check");
  add_common(fd, args);
  fd->add_option("--type", fd_type, "rs|rd|init");
  fd->add_option("--at", fd_at, "perturbation time (default: first applicable)");
  fd->add_option("--levels", fd_levels, "number of halving levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return run_simulate(args, control_path);
    if (cert->parsed()) return run_certify(args, extremal_spec);
    if (solve->parsed()) return run_solve(args);
    if (oracle->parsed()) return run_oracle(args, grid_count);
    if (examples->parsed()) return run_examples(args);
    if (fd->parsed()) return run_fdcheck(args, fd_type, fd_at, fd_levels);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == Err::NoConvergence) return 4;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
