#pragma once

#include <vector>

#include "freshcache/model.hpp"

namespace fresh {

// Optimal long-run average cost rate of the single-content problem at a given
// holding cost (holding charges included).
struct RelaxedValue {
  double theta = 0.0;
  Regime regime = Regime::Zero;
};

// Maximizer of the dual function D(C_h) = sum_n theta_n(C_h) - C_h * M.
struct DualResult {
  double ch_opt = 0.0;
  double lower_bound = 0.0;
  std::vector<double> per_content_theta;
};

// Staleness break-even time c_f / (c_a * lambda); +inf for static contents.
double tau_zero(const CostModel& cost, double lambda);

// Refresh threshold at zero holding cost: the positive root of
//   2 c_a l t + p b c_a l t^2 - 2 c_f = 0,
// computed in cancellation-free form. +inf for lambda = 0.
double tau_star(double p, const CostModel& cost, double lambda);

// Index cap I = p b c_f - p c_a l (1 - exp(-b tau_zero)); equals p b c_f in
// the static limit.
double index_cap(double p, const CostModel& cost, double lambda);

// Unique x >= 0 with x + exp(-x) = 1 + C_h / (p c_a l). Safeguarded Newton on
// the bracket [r, 1 + r]; x equals beta * (tau_tilde - tau_bar).
double solve_gap(double holding_cost, double p, double ageing_cost,
                 double lambda);

// Residuals of the two threshold equations; both vanish at (tau_bar,
// tau_tilde) for the given holding cost.
double threshold_eq1_residual(double tau_bar, double tau_tilde,
                              double holding_cost, double p,
                              const CostModel& cost, double lambda);
double threshold_eq2_residual(double tau_bar, double tau_tilde,
                              double holding_cost, double p,
                              const CostModel& cost, double lambda);

// Full threshold family at one holding cost. C_h = 0 collapses to tau_star,
// C_h >= I returns the degenerate set (0, tau_zero) marked AboveCap, and the
// interior case solves the gap equation and the tau_bar quadratic, with a
// short Newton polish on the pair of equations.
ThresholdSet thresholds(double holding_cost, double p, const CostModel& cost,
                        double lambda);

// Whittle index for states (tau,1,0) and (0,1). (0,1) maps to the index cap;
// (tau,1,0) maps to 0 for tau >= tau_star and otherwise to the unique holding
// cost with tau_bar(C_h) = tau, found by bisection (tau_bar is decreasing in
// C_h). Rejects (tau,1,1) and (0,0).
double whittle_index(const ObservedState& s, double p, const CostModel& cost,
                     double lambda, double tau_tol = 1e-9, int max_iters = 200);

// Same value as whittle_index((tau,1,0)) through a single scalar root solve
// in the gap variable; used in simulation hot loops. Agrees with
// whittle_index to solver precision.
double whittle_index_fast(double tau, double p, const CostModel& cost,
                          double lambda);

// Table of optimal average cost rates: p b c_a l tau_star at C_h = 0,
// p b c_a l tau_tilde in the interior, p b c_f above the cap. Continuous at
// both regime boundaries; min(C_h, p b c_f) in the static limit.
RelaxedValue relaxed_value(double holding_cost, double p,
                           const CostModel& cost, double lambda);

// Lagrangian lower bound: dense grid scan of D(C_h) over [0, max_n I_n]
// followed by golden-section refinement around the best grid point.
DualResult dual_lower_bound(const Catalog& catalog, const CostModel& cost,
                            int grid_points = 2000);

}  // namespace fresh
