#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tspmp/certificate.hpp"

namespace tspmp {

/// Named ready-made problems: the three discrete worked examples, a scalar
/// linear-quadratic benchmark, a hybrid-scale demo, a planar double
/// integrator with free final time, and its time-rescaled parametric form.
ControlProblem make_builtin(const std::string& name);

std::vector<std::string> builtin_names();

/// Reference extremal (trajectory, adjoint, multipliers) where one is known
/// in closed form; sampled with step h on dense segments.
std::optional<Extremal> reference_extremal(const std::string& name, double h = 1e-3);

}  // namespace tspmp
