#pragma once

#include <Eigen/Core>

#include "tspmp/grid_function.hpp"
#include "tspmp/time_scale.hpp"

namespace tspmp {

/// Integral of f over [c,d) against the delta measure: composite trapezoid on
/// dense cells plus graininess-weighted jumps at right-scattered points.
Eigen::VectorXd delta_integral(const TimeScale& ts, const GridFunction& f, double c, double d);

/// Forward delta derivative of f at a grid point t < max T. Exact divided
/// difference across the gap at right-scattered points; centered (one-sided
/// at segment boundaries) finite difference at right-dense points.
Eigen::VectorXd delta_derivative(const TimeScale& ts, const GridFunction& f, double t);

/// Generalized exponential e_L(t,c) = exp(L * dense length) * prod(1 + L*mu)
/// over the right-scattered points of [c,t).
double generalized_exp(const TimeScale& ts, double rate, double c, double t);

/// The bound t -> L1 * e_{L2}(t,c) sampled on [c,d] with step <= h.
GridFunction gronwall_envelope(const TimeScale& ts, double l1, double l2, double c, double d,
                               double h = 1e-3);

/// |<q,q2>^Delta(t) - <q^Delta(t), q2(sigma(t))> - <q(t), q2^Delta(t)>|.
/// With swap_sigma the sigma shift moves to the first factor.
double leibniz_residual(const TimeScale& ts, const GridFunction& q, const GridFunction& q2,
                        double t, bool swap_sigma = false);

}  // namespace tspmp
