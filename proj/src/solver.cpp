#include "freshcache/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fresh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_content(double p, const CostModel& cost, double lambda) {
  cost.validate();
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in (0, 1]");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
}

// Positive root of t^2 + 2 a t - c = 0 without cancellation.
double positive_quadratic_root(double a, double c) {
  if (c <= 0.0) return 0.0;
  return c / (a + std::sqrt(a * a + c));
}

}  // namespace

double tau_zero(const CostModel& cost, double lambda) {
  check_content(1.0, cost, lambda);
  if (lambda == 0.0) return kInf;
  return cost.fetch_cost / (cost.ageing_cost * lambda);
}

double tau_star(double p, const CostModel& cost, double lambda) {
  check_content(p, cost, lambda);
  if (lambda == 0.0) return kInf;
  const double pb = p * cost.request_rate;
  return positive_quadratic_root(
      1.0 / pb, 2.0 * cost.fetch_cost / (pb * cost.ageing_cost * lambda));
}

double index_cap(double p, const CostModel& cost, double lambda) {
  check_content(p, cost, lambda);
  const double pbcf = p * cost.request_rate * cost.fetch_cost;
  if (lambda == 0.0) return pbcf;
  const double bt0 = cost.request_rate * tau_zero(cost, lambda);
  return pbcf + p * cost.ageing_cost * lambda * std::expm1(-bt0);
}

double solve_gap(double holding_cost, double p, double ageing_cost,
                 double lambda) {
  if (!(holding_cost >= 0.0))
    throw std::invalid_argument("holding_cost must be >= 0");
  if (!(p > 0.0) || !(ageing_cost > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("solve_gap needs p, c_a, lambda > 0");
  const double r = holding_cost / (p * ageing_cost * lambda);
  if (r == 0.0) return 0.0;

  // f(x) = x + exp(-x) - 1 - r, increasing and convex on x > 0 with the root
  // inside [r, 1 + r].
  const auto f = [r](double x) { return (x - r) + std::expm1(-x); };
  double lo = r, hi = 1.0 + r;
  double x = r < 1.0 ? std::sqrt(2.0 * r) : 1.0 + r;
  x = std::clamp(x, lo, hi);
  const double tol =
      4.0 * std::numeric_limits<double>::epsilon() * (1.0 + r) + 1e-15;
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (std::fabs(fx) <= tol) break;
    if (fx > 0.0) hi = x; else lo = x;
    const double d = -std::expm1(-x);  // f'(x) = 1 - exp(-x)
    double next = d > 0.0 ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return x;
}

double threshold_eq1_residual(double tau_bar, double tau_tilde,
                              double holding_cost, double p,
                              const CostModel& cost, double lambda) {
  const double cal = cost.ageing_cost * lambda;
  return cal * p * cost.request_rate *
             (tau_tilde * tau_bar - 0.5 * tau_bar * tau_bar) -
         holding_cost * tau_bar + cal * tau_tilde - cost.fetch_cost;
}

double threshold_eq2_residual(double tau_bar, double tau_tilde,
                              double holding_cost, double p,
                              const CostModel& cost, double lambda) {
  const double x = cost.request_rate * (tau_tilde - tau_bar);
  const double r = holding_cost / (p * cost.ageing_cost * lambda);
  return (x - r) + std::expm1(-x);
}

namespace {

// One or two Newton corrections on the pair of threshold equations; keeps the
// closed-form iterate unless the scaled residual actually improves.
void polish_thresholds(double& tau_bar, double& tau_tilde, double holding_cost,
                       double p, const CostModel& cost, double lambda) {
  const double b = cost.request_rate;
  const double cal = cost.ageing_cost * lambda;
  const auto scaled_residual = [&](double tb, double tt) {
    const double s1 = cal * p * b * (tt * tb + 0.5 * tb * tb) +
                      holding_cost * tb + cal * tt + cost.fetch_cost;
    const double s2 = b * (tt - tb) + 1.0 + holding_cost / (p * cal);
    const double f1 =
        threshold_eq1_residual(tb, tt, holding_cost, p, cost, lambda);
    const double f2 =
        threshold_eq2_residual(tb, tt, holding_cost, p, cost, lambda);
    return std::max(std::fabs(f1) / s1, std::fabs(f2) / s2);
  };

  double best = scaled_residual(tau_bar, tau_tilde);
  for (int it = 0; it < 3 && best > 1e-13; ++it) {
    const double f1 = threshold_eq1_residual(tau_bar, tau_tilde, holding_cost,
                                             p, cost, lambda);
    const double f2 = threshold_eq2_residual(tau_bar, tau_tilde, holding_cost,
                                             p, cost, lambda);
    const double j11 = cal * p * b * (tau_tilde - tau_bar) - holding_cost;
    const double j12 = cal * p * b * tau_bar + cal;
    const double e = -std::expm1(-b * (tau_tilde - tau_bar));  // 1 - exp(-x)
    const double j21 = -b * e, j22 = b * e;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0) return;
    const double db = (f1 * j22 - f2 * j12) / det;
    const double dt = (j11 * f2 - j21 * f1) / det;
    const double nb = tau_bar - db, nt = tau_tilde - dt;
    if (!(nb >= 0.0) || !(nt >= nb)) return;
    const double res = scaled_residual(nb, nt);
    if (res >= best) return;
    tau_bar = nb;
    tau_tilde = nt;
    best = res;
  }
}

}  // namespace

ThresholdSet thresholds(double holding_cost, double p, const CostModel& cost,
                        double lambda) {
  if (!(holding_cost >= 0.0))
    throw std::invalid_argument("holding_cost must be >= 0");
  check_content(p, cost, lambda);

  ThresholdSet t;
  t.holding_cost = holding_cost;
  t.tau_zero = tau_zero(cost, lambda);
  t.tau_star = tau_star(p, cost, lambda);
  t.index_cap = index_cap(p, cost, lambda);

  if (holding_cost == 0.0) {
    t.regime = Regime::Zero;
    t.tau_bar = t.tau_tilde = t.tau_star;
    return t;
  }
  if (lambda == 0.0) {
    // Static content: never stale, so keep forever below the cap.
    if (holding_cost >= t.index_cap) {
      t.regime = Regime::AboveCap;
      t.tau_bar = 0.0;
      t.tau_tilde = t.tau_zero;
    } else {
      t.regime = Regime::Interior;
      t.tau_bar = t.tau_tilde = kInf;
    }
    return t;
  }
  if (holding_cost >= t.index_cap) {
    t.regime = Regime::AboveCap;
    t.tau_bar = 0.0;
    t.tau_tilde = t.tau_zero;
    return t;
  }

  t.regime = Regime::Interior;
  const double b = cost.request_rate;
  const double x = solve_gap(holding_cost, p, cost.ageing_cost, lambda);
  // tau_bar solves tb^2 + 2 A tb - B = 0; the gap equation makes
  // x - C_h/(p c_a l) equal 1 - exp(-x), which is the stable form of A.
  const double a = (-std::expm1(-x) + 1.0 / p) / b;
  const double big_b =
      std::max(0.0, 2.0 * (b * t.tau_zero - x) / (p * b * b));
  t.tau_bar = positive_quadratic_root(a, big_b);
  t.tau_tilde = t.tau_bar + x / b;
  polish_thresholds(t.tau_bar, t.tau_tilde, holding_cost, p, cost, lambda);
  return t;
}

double whittle_index(const ObservedState& s, double p, const CostModel& cost,
                     double lambda, double tau_tol, int max_iters) {
  check_content(p, cost, lambda);
  if (!s.cached && s.requested) return index_cap(p, cost, lambda);
  if (!s.cached || s.requested)
    throw std::invalid_argument(
        "whittle_index is defined for states (tau,1,0) and (0,1)");

  // state (tau, 1, 0)
  if (lambda == 0.0) return index_cap(p, cost, lambda);
  const double ts = tau_star(p, cost, lambda);
  if (s.tau >= ts) return 0.0;

  // tau_bar is strictly decreasing in C_h from tau_star down to 0 at I, so
  // bisection brackets the unique preimage.
  double lo = 0.0, hi = index_cap(p, cost, lambda);
  double mid = 0.5 * hi;
  for (int it = 0; it < max_iters; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double tb = thresholds(mid, p, cost, lambda).tau_bar;
    if (std::fabs(tb - s.tau) <= tau_tol * std::max(1.0, s.tau) &&
        hi - lo <= 1e-12 * std::max(1.0, hi))
      break;
    if (tb > s.tau) lo = mid; else hi = mid;
  }
  return mid;
}

double whittle_index_fast(double tau, double p, const CostModel& cost,
                          double lambda) {
  check_content(p, cost, lambda);
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  if (lambda == 0.0) return index_cap(p, cost, lambda);

  const double b = cost.request_rate;
  const double t0 = tau_zero(cost, lambda);
  const double pb = p * b;
  // F(0) = p b tau^2/2 + tau - t0 hits zero exactly at tau_star.
  const double f0 = 0.5 * pb * tau * tau + tau - t0;
  if (f0 >= 0.0) return 0.0;

  // Substituting tau_tilde = tau + x/b into the first threshold equation
  // leaves a single increasing function of the gap variable x.
  const auto f = [&](double x) {
    return f0 - p * tau * std::expm1(-x) + x / b;
  };
  double lo = 0.0, hi = b * t0;
  double x = std::clamp(-f0 * b, lo, hi);
  const double tol = 1e-14 * std::max(1.0, t0);
  for (int it = 0; it < 100; ++it) {
    const double fx = f(x);
    if (std::fabs(fx) <= tol) break;
    if (fx > 0.0) hi = x; else lo = x;
    const double d = p * tau * std::exp(-x) + 1.0 / b;
    double next = x - fx / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return std::max(0.0, p * cost.ageing_cost * lambda * (x + std::expm1(-x)));
}

RelaxedValue relaxed_value(double holding_cost, double p,
                           const CostModel& cost, double lambda) {
  if (!(holding_cost >= 0.0))
    throw std::invalid_argument("holding_cost must be >= 0");
  check_content(p, cost, lambda);
  const double pbcf = p * cost.request_rate * cost.fetch_cost;
  if (lambda == 0.0) {
    // Hold forever and pay C_h, or refetch every request and pay p b c_f.
    const double cap = index_cap(p, cost, lambda);
    Regime r = holding_cost == 0.0 ? Regime::Zero
               : holding_cost < cap ? Regime::Interior
                                    : Regime::AboveCap;
    return RelaxedValue{std::min(holding_cost, pbcf), r};
  }
  const ThresholdSet t = thresholds(holding_cost, p, cost, lambda);
  switch (t.regime) {
    case Regime::Zero:
      return RelaxedValue{p * cost.request_rate * cost.ageing_cost * lambda *
                              t.tau_star,
                          t.regime};
    case Regime::Interior:
      return RelaxedValue{p * cost.request_rate * cost.ageing_cost * lambda *
                              t.tau_tilde,
                          t.regime};
    case Regime::AboveCap:
      return RelaxedValue{pbcf, t.regime};
  }
  return RelaxedValue{pbcf, Regime::AboveCap};
}

DualResult dual_lower_bound(const Catalog& catalog, const CostModel& cost,
                            int grid_points) {
  catalog.validate();
  cost.validate();
  if (grid_points < 1000) grid_points = 1000;

  const double m = static_cast<double>(catalog.cache_capacity);
  double ch_max = 0.0;
  for (const auto& c : catalog.contents)
    if (c.popularity > 0.0)
      ch_max = std::max(ch_max, index_cap(c.popularity, cost, c.lambda));

  const auto dual = [&](double ch) {
    double total = -ch * m;
    for (const auto& c : catalog.contents) {
      if (c.popularity <= 0.0) continue;
      total += relaxed_value(ch, c.popularity, cost, c.lambda).theta;
    }
    return total;
  };

  double best_ch = 0.0, best_val = dual(0.0);
  const double step = ch_max / grid_points;
  for (int i = 1; i <= grid_points; ++i) {
    const double ch = i * step;
    const double v = dual(ch);
    if (v > best_val) {
      best_val = v;
      best_ch = ch;
    }
  }

  // Golden-section refinement inside the bracketing grid cells.
  if (ch_max > 0.0) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::max(0.0, best_ch - step);
    double b = std::min(ch_max, best_ch + step);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = dual(c), fd = dual(d);
    for (int it = 0; it < 100 && (b - a) > 1e-12 * std::max(1.0, ch_max);
         ++it) {
      if (fc > fd) {
        b = d; d = c; fd = fc;
        c = b - gr * (b - a);
        fc = dual(c);
      } else {
        a = c; c = d; fc = fd;
        d = a + gr * (b - a);
        fd = dual(d);
      }
    }
    const double mid = 0.5 * (a + b);
    const double fm = dual(mid);
    if (fm > best_val) {
      best_val = fm;
      best_ch = mid;
    }
  }

  DualResult out;
  out.ch_opt = best_ch;
  out.lower_bound = best_val;
  out.per_content_theta.reserve(catalog.contents.size());
  for (const auto& c : catalog.contents)
    out.per_content_theta.push_back(
        c.popularity > 0.0
            ? relaxed_value(best_ch, c.popularity, cost, c.lambda).theta
            : 0.0);
  return out;
}

}  // namespace fresh
