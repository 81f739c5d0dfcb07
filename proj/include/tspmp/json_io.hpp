#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "tspmp/certificate.hpp"
#include "tspmp/registry.hpp"

namespace tspmp {

using nlohmann::json;

json to_json(const TimeScale& ts);
TimeScale timescale_from_json(const json& j);

json to_json(const GridFunction& f);
GridFunction gridfunction_from_json(const json& j);

json to_json(const ConstraintSet& s);
ConstraintSet constraint_from_json(const json& j);

json to_json(const ConvexTarget& t);
ConvexTarget target_from_json(const json& j);

json to_json(const Expr& e);
Expr expr_from_json(const json& j);

json to_json(const ControlProblem& pb);
/// Accepts either {"builtin": name} or a full problem description.
ControlProblem problem_from_json(const json& j);

json to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const json& j);

json to_json(const Extremal& ex);
Extremal extremal_from_json(const json& j);

json to_json(const PMPReport& rep);

/// One row per grid point: t, right-class, values...
void write_gridfunction_csv(std::ostream& os, const TimeScale& ts, const GridFunction& f);
GridFunction read_gridfunction_csv(std::istream& is);

/// Trajectory rows: t, class, state..., control..., cost.
void write_trajectory_csv(std::ostream& os, const TimeScale& ts, const Trajectory& traj);

void write_fd_check_csv(std::ostream& os, const std::vector<std::pair<double, double>>& rows);

}  // namespace tspmp
