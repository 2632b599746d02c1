// Independent oracles for frozen expected values. Everything here recomputes
// quantities from first principles (bisection, plain Newton, dense scans) and
// must stay decoupled from the library's solver paths.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "freshcache/model.hpp"
#include "freshcache/solver.hpp"

namespace oracle {

// Plain interval bisection; f(lo) and f(hi) must bracket a sign change.
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double tol = 1e-13, int iters = 400) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (f(hi) == 0.0) return hi;
  if (flo * f(hi) > 0.0) throw std::runtime_error("oracle::bisect: no bracket");
  for (int i = 0; i < iters && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0)
      hi = mid;
    else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

// tau_star as the bisection root of the quadratic
// 2 c_a l t + p b c_a l t^2 - 2 c_f = 0.
inline double tau_star_bisection(double p, const fresh::CostModel& c,
                                 double lambda) {
  const auto f = [&](double t) {
    return 2.0 * c.ageing_cost * lambda * t +
           p * c.request_rate * c.ageing_cost * lambda * t * t -
           2.0 * c.fetch_cost;
  };
  const double hi = c.fetch_cost / (c.ageing_cost * lambda) + 1.0;
  return bisect(f, 0.0, hi);
}

// gap equation root by bisection on [0, 1 + r].
inline double gap_bisection(double holding_cost, double p, double ca,
                            double lambda) {
  const double r = holding_cost / (p * ca * lambda);
  const auto f = [&](double x) { return x + std::exp(-x) - 1.0 - r; };
  return bisect(f, 0.0, 1.0 + r);
}

// Independent 2-D Newton on the raw threshold equations, started from a
// deliberately crude guess so it does not inherit the library's closed form.
inline std::pair<double, double> thresholds_newton(double holding_cost,
                                                   double p,
                                                   const fresh::CostModel& c,
                                                   double lambda) {
  const double b = c.request_rate;
  const double cal = c.ageing_cost * lambda;
  const double t0 = c.fetch_cost / cal;
  double tb = 0.5 * t0, tt = 0.9 * t0;
  for (int i = 0; i < 200; ++i) {
    const double f1 = cal * p * b * (tt * tb - 0.5 * tb * tb) -
                      holding_cost * tb + cal * tt - c.fetch_cost;
    const double x = b * (tt - tb);
    const double f2 = x + std::exp(-x) - 1.0 - holding_cost / (p * cal);
    if (std::fabs(f1) < 1e-13 && std::fabs(f2) < 1e-13) break;
    const double j11 = cal * p * b * (tt - tb) - holding_cost;
    const double j12 = cal * p * b * tb + cal;
    const double e = 1.0 - std::exp(-x);
    const double j21 = -b * e, j22 = b * e;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0) break;
    tb -= (f1 * j22 - f2 * j12) / det;
    tt -= (j11 * f2 - j21 * f1) / det;
    if (tb < 0.0) tb = 1e-12;
    if (tt < tb) tt = tb + 1e-12;
  }
  return {tb, tt};
}

// Dense scan of the dual function, the brute-force counterpart of
// dual_lower_bound's grid + refinement.
inline std::pair<double, double> dual_scan(const fresh::Catalog& cat,
                                           const fresh::CostModel& cost,
                                           int points) {
  double ch_max = 0.0;
  for (const auto& c : cat.contents)
    ch_max = std::max(ch_max, fresh::index_cap(c.popularity, cost, c.lambda));
  double best_ch = 0.0, best = -1e300;
  for (int i = 0; i <= points; ++i) {
    const double ch = ch_max * i / points;
    double d = -ch * cat.cache_capacity;
    for (const auto& c : cat.contents)
      d += fresh::relaxed_value(ch, c.popularity, cost, c.lambda).theta;
    if (d > best) {
      best = d;
      best_ch = ch;
    }
  }
  return {best_ch, best};
}

// Long-run cost rate of the single-content refresh-at-tau_star cycle: fetch
// c_f plus Poisson ageing over serves in [0, tau_star] at request rate p b,
// renewed at the first request past tau_star. Simplifies to p b c_a l
// tau_star via the tau_star quadratic.
inline double renewal_rate(double p, const fresh::CostModel& c, double lambda) {
  const double ts = tau_star_bisection(p, c, lambda);
  const double pb = p * c.request_rate;
  const double cycle_cost =
      c.fetch_cost + 0.5 * c.ageing_cost * lambda * pb * ts * ts;
  const double cycle_len = ts + 1.0 / pb;
  return cycle_cost / cycle_len;
}

}  // namespace oracle
