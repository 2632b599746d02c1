#include "freshcache/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "freshcache/solver.hpp"

namespace fresh {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

GridConfig default_grid(const CostModel& cost, double lambda) {
  const double t0 = tau_zero(cost, lambda);
  if (!std::isfinite(t0))
    throw std::invalid_argument("default_grid needs lambda > 0");
  return GridConfig{t0 / 2000.0,
                    std::max(2.0 * t0, t0 + 6.0 / cost.request_rate)};
}

double DiscreteModel::cell_mass(int j) const {
  return std::pow(decay, j) * (1.0 - decay);
}

std::vector<double> DiscreteModel::row_weights(int i) const {
  const int k = cells();
  std::vector<double> w(k - i + 1, 0.0);
  // trapezoid split of each cell mass onto its two endpoints, tail lumped
  for (int j = 0; j < k - i; ++j) {
    const double mass = cell_mass(j);
    w[j] += 0.5 * mass;
    w[j + 1] += 0.5 * mass;
  }
  w[k - i] += std::pow(decay, k - i);
  return w;
}

DiscreteModel discretize(double p, const CostModel& cost, double lambda,
                         double holding_cost, GridConfig grid) {
  cost.validate();
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in (0, 1]");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(holding_cost >= 0.0))
    throw std::invalid_argument("holding_cost must be >= 0");
  if (!(grid.step > 0.0)) throw std::invalid_argument("grid step must be > 0");
  if (lambda > 0.0 && grid.tau_max < tau_star(p, cost, lambda))
    throw std::invalid_argument("tau_max must be >= tau_star");

  DiscreteModel m;
  m.p = p;
  m.lambda = lambda;
  m.holding_cost = holding_cost;
  m.cost = cost;
  m.step = grid.step;
  m.decay = std::exp(-cost.request_rate * grid.step);
  const int k = std::max(2, static_cast<int>(std::ceil(grid.tau_max / grid.step)));
  m.tau.resize(k + 1);
  for (int i = 0; i <= k; ++i) m.tau[i] = i * grid.step;
  return m;
}

namespace {

// One application of the theta-free Bellman operator. The -theta/beta term of
// the semi-MDP equations is uniform across states and actions (every epoch is
// one exponential inter-request time), so relative normalization absorbs it.
struct Sweep {
  std::vector<double> t11, t10, l;
  double t01 = 0.0, t00 = 0.0;

  void apply(const DiscreteModel& m, const std::vector<double>& v11,
             const std::vector<double>& v10, double v01, double v00) {
    const int k = m.cells();
    const double cal = m.cost.ageing_cost * m.lambda;
    const double chb = m.holding_cost / m.cost.request_rate;
    const double cf = m.cost.fetch_cost;
    t11.resize(k + 1);
    t10.resize(k + 1);
    l.resize(k + 1);

    // L(tau_i) = E[ p v11 + (1-p) v10 at tau_i + jump ], computed backwards:
    // per-cell trapezoid with exponential mass, tail lumped on the last point.
    const double half = 0.5 * (1.0 - m.decay);
    const auto u = [&](int i) { return m.p * v11[i] + (1.0 - m.p) * v10[i]; };
    l[k] = u(k);
    for (int i = k - 1; i >= 0; --i)
      l[i] = half * (u(i) + u(i + 1)) + m.decay * l[i + 1];

    const double cont = m.p * v01 + (1.0 - m.p) * v00;  // discard continuation
    const double a1 = cf + chb + l[0];                  // fetch and cache
    for (int i = 0; i <= k; ++i) {
      const double age = cal * m.tau[i];
      t11[i] = std::min(std::min(age + chb + l[i], a1),
                        std::min(age + cont, cf + cont));
      t10[i] = std::min(chb + l[i], cont);
    }
    t01 = cf + std::min(chb + l[0], cont);
    t00 = cont;
  }
};

// Greedy argmin with ties resolved toward the keep side, matching the
// boundary convention of the closed forms: 0 over 2 over 1 over 3.
Action pick(const double* vals, const Action* acts, int n, double tie_eps) {
  static const int rank[4] = {0, 2, 1, 3};
  double best = vals[0];
  for (int i = 1; i < n; ++i) best = std::min(best, vals[i]);
  int chosen = -1;
  for (int i = 0; i < n; ++i) {
    if (vals[i] <= best + tie_eps &&
        (chosen < 0 ||
         rank[static_cast<int>(acts[i])] < rank[static_cast<int>(acts[chosen])]))
      chosen = i;
  }
  return acts[chosen];
}

}  // namespace

ValueTable rvi_solve(const DiscreteModel& m) {
  return rvi_solve(m, 1e-9 * m.cost.request_rate * m.cost.fetch_cost, 100000);
}

ValueTable rvi_solve(const DiscreteModel& m, double epsilon, int max_iters) {
  const int k = m.cells();
  ValueTable t;
  t.v11.assign(k + 1, 0.0);
  t.v10.assign(k + 1, 0.0);

  Sweep sweep;
  double span = kNan;
  int it = 0;
  for (; it < max_iters; ++it) {
    sweep.apply(m, t.v11, t.v10, t.v01, t.v00);
    double dmin = sweep.t00 - t.v00, dmax = dmin;
    const auto fold = [&](double d) {
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    };
    fold(sweep.t01 - t.v01);
    for (int i = 0; i <= k; ++i) {
      fold(sweep.t11[i] - t.v11[i]);
      fold(sweep.t10[i] - t.v10[i]);
    }
    span = dmax - dmin;

    const double ref = sweep.t11[m.ref_index];
    for (int i = 0; i <= k; ++i) {
      t.v11[i] = sweep.t11[i] - ref;
      t.v10[i] = sweep.t10[i] - ref;
    }
    t.v01 = sweep.t01 - ref;
    t.v00 = sweep.t00 - ref;
    if (span < epsilon) break;
  }
  t.iterations = it + 1;
  t.final_span = span;
  if (!(span < epsilon)) {
    std::ostringstream msg;
    msg << "relative value iteration did not converge after " << max_iters
        << " sweeps (span " << span << ", epsilon " << epsilon << ")";
    throw std::runtime_error(msg.str());
  }

  // theta from the (0,0)/(0,1) fixed-point identity.
  t.theta_hat = m.p * m.cost.request_rate * (t.v01 - t.v00);

  // Greedy actions at the converged values.
  const double tie_eps = 1e-6 * std::max(1.0, m.cost.fetch_cost);
  sweep.apply(m, t.v11, t.v10, t.v01, t.v00);
  const double cal = m.cost.ageing_cost * m.lambda;
  const double chb = m.holding_cost / m.cost.request_rate;
  const double cf = m.cost.fetch_cost;
  const double cont = m.p * t.v01 + (1.0 - m.p) * t.v00;
  t.greedy11.resize(k + 1);
  t.greedy10.resize(k + 1);
  static const Action acts11[4] = {Action::ServeKeep, Action::FetchCache,
                                   Action::Discard, Action::FetchDiscard};
  static const Action acts10[2] = {Action::ServeKeep, Action::Discard};
  static const Action acts01[2] = {Action::FetchCache, Action::FetchDiscard};
  for (int i = 0; i <= k; ++i) {
    const double age = cal * m.tau[i];
    const double vals11[4] = {age + chb + sweep.l[i], cf + chb + sweep.l[0],
                              age + cont, cf + cont};
    t.greedy11[i] = pick(vals11, acts11, 4, tie_eps);
    const double vals10[2] = {chb + sweep.l[i], cont};
    t.greedy10[i] = pick(vals10, acts10, 2, tie_eps);
  }
  const double vals01[2] = {cf + chb + sweep.l[0], cf + cont};
  t.greedy01 = pick(vals01, acts01, 2, tie_eps);
  return t;
}

namespace {

[[noreturn]] void structural_violation(const char* what) {
  throw std::runtime_error(std::string("structural violation: ") + what);
}

// Maximal runs of equal actions as (action, first index) pairs.
std::vector<std::pair<Action, int>> runs_of(const std::vector<Action>& row) {
  std::vector<std::pair<Action, int>> runs;
  for (int i = 0; i < static_cast<int>(row.size()); ++i)
    if (runs.empty() || runs.back().first != row[i]) runs.push_back({row[i], i});
  return runs;
}

}  // namespace

ThresholdScan extract_thresholds(const DiscreteModel& m, const ValueTable& t) {
  ThresholdScan scan;
  scan.tau_star_hat = scan.tau_bar_hat = scan.tau_tilde_hat =
      scan.tau_zero_hat = kNan;

  const double cap = index_cap(m.p, m.cost, m.lambda);
  scan.regime = m.holding_cost == 0.0  ? Regime::Zero
                : m.holding_cost < cap ? Regime::Interior
                                       : Regime::AboveCap;

  const auto runs11 = runs_of(t.greedy11);
  const auto runs10 = runs_of(t.greedy10);
  const auto actions_are = [](const std::vector<std::pair<Action, int>>& runs,
                              std::initializer_list<Action> want) {
    if (runs.size() != want.size()) return false;
    auto it = want.begin();
    for (const auto& r : runs)
      if (r.first != *it++) return false;
    return true;
  };

  switch (scan.regime) {
    case Regime::Zero:
      if (!actions_are(runs11, {Action::ServeKeep, Action::FetchCache}))
        structural_violation("expected keep->fetch along (tau,1,1) at C_h = 0");
      scan.tau_star_hat = m.tau[runs11[1].second];
      if (!actions_are(runs10, {Action::ServeKeep}))
        structural_violation("expected keep everywhere on (tau,1,0) at C_h = 0");
      if (t.greedy01 != Action::FetchCache)
        structural_violation("expected fetch-cache at (0,1) at C_h = 0");
      break;
    case Regime::Interior: {
      // tau_bar may round below the first grid step, leaving no keep-run.
      const bool full = actions_are(
          runs11, {Action::ServeKeep, Action::Discard, Action::FetchCache});
      if (!full && !actions_are(runs11, {Action::Discard, Action::FetchCache}))
        structural_violation("expected keep->discard->fetch along (tau,1,1)");
      scan.tau_bar_hat = full ? m.tau[runs11[1].second] : 0.0;
      scan.tau_tilde_hat = m.tau[runs11[full ? 2 : 1].second];
      const bool full10 =
          actions_are(runs10, {Action::ServeKeep, Action::Discard});
      if (!full10 && !actions_are(runs10, {Action::Discard}))
        structural_violation("expected keep->discard along (tau,1,0)");
      const double bar10 = full10 ? m.tau[runs10[1].second] : 0.0;
      if (std::fabs(bar10 - scan.tau_bar_hat) > m.step + 1e-12)
        structural_violation("(tau,1,1) and (tau,1,0) disagree about tau_bar");
      if (t.greedy01 != Action::FetchCache)
        structural_violation("expected fetch-cache at (0,1) below the cap");
      break;
    }
    case Regime::AboveCap:
      if (actions_are(runs11, {Action::Discard, Action::FetchDiscard}))
        scan.tau_zero_hat = m.tau[runs11[1].second];
      else if (!actions_are(runs11, {Action::Discard}))
        structural_violation("expected discard->fetch-discard along (tau,1,1)");
      if (!actions_are(runs10, {Action::Discard}))
        structural_violation("expected discard everywhere on (tau,1,0)");
      if (t.greedy01 != Action::FetchDiscard)
        structural_violation("expected fetch-discard at (0,1) above the cap");
      break;
  }
  return scan;
}

}  // namespace fresh
