#pragma once

#include <vector>

#include "freshcache/model.hpp"

namespace fresh {

struct GridConfig {
  double step = 0.0;     // tau grid spacing
  double tau_max = 0.0;  // last grid point; values are clamped beyond it
};

// Default grid: step = tau_zero / 2000, tau_max = max(2 tau_zero,
// tau_zero + 6 / beta). Requires lambda > 0 (static contents need an explicit
// grid since tau_zero is infinite).
GridConfig default_grid(const CostModel& cost, double lambda);

// Discretized single-content semi-MDP on a uniform tau grid. The exponential
// inter-request jump is quantized to per-cell masses (1-d) d^j with
// d = exp(-beta step); mass beyond the last grid point is lumped onto it, so
// every kernel row is exactly stochastic. The expectation over the jump uses
// the trapezoid value of each cell.
struct DiscreteModel {
  double p = 0.0;
  double lambda = 0.0;
  double holding_cost = 0.0;
  CostModel cost;
  double step = 0.0;
  double decay = 0.0;        // exp(-beta * step)
  std::vector<double> tau;   // grid points tau[0] = 0 .. tau[K] = tau_max
  int ref_index = 0;         // normalization state (tau[0], 1, 1)

  int cells() const { return static_cast<int>(tau.size()) - 1; }
  // Probability mass of the j-th jump cell [j step, (j+1) step).
  double cell_mass(int j) const;
  // Weights this row places on grid offsets 0..K-i (tail lump included);
  // sums to 1.
  std::vector<double> row_weights(int i) const;
};

// Builds the discrete model; rejects step <= 0 and (for ageing contents)
// tau_max < tau_star.
DiscreteModel discretize(double p, const CostModel& cost, double lambda,
                         double holding_cost, GridConfig grid);

struct ValueTable {
  std::vector<double> v11, v10;  // relative values along the tau grid
  double v01 = 0.0, v00 = 0.0;
  double theta_hat = 0.0;        // recovered from p*beta*(v01 - v00)
  std::vector<Action> greedy11, greedy10;
  Action greedy01 = Action::FetchCache;
  int iterations = 0;
  double final_span = 0.0;
};

// Relative value iteration on the four Bellman updates, normalizing by the
// reference state each sweep and stopping when the span seminorm of
// successive differences drops below epsilon. Throws std::runtime_error with
// the last span on non-convergence.
ValueTable rvi_solve(const DiscreteModel& m, double epsilon, int max_iters);

// Defaults: epsilon = 1e-9 * beta * c_f, max_iters = 100000.
ValueTable rvi_solve(const DiscreteModel& m);

// Empirical switch points of the greedy policy along the tau grid. Fields are
// NaN when the regime has no such switch.
struct ThresholdScan {
  Regime regime = Regime::Zero;
  double tau_star_hat = 0.0;
  double tau_bar_hat = 0.0;
  double tau_tilde_hat = 0.0;
  double tau_zero_hat = 0.0;
};

// Scans the greedy actions and checks they form the regime's expected
// pattern; throws std::runtime_error on a structural violation. Near-equal
// action values count as ties and go to the keep side (exact indifference
// regions exist at C_h = 0), which rvi_solve already folds into the stored
// greedy actions.
ThresholdScan extract_thresholds(const DiscreteModel& m, const ValueTable& t);

}  // namespace fresh
