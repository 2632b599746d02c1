#pragma once

#include <string>
#include <vector>

namespace fresh {

// Per-content parameters: Poisson update rate at the origin and request share.
struct ContentParams {
  int id = 1;            // 1-based catalog index
  double lambda = 0.0;   // updates per unit time, >= 0
  double popularity = 0.0;
};

// Cost and request-process parameters shared by the whole catalog.
struct CostModel {
  double fetch_cost = 1.0;    // c_f, charged per fetch
  double ageing_cost = 1.0;   // c_a, charged per missed update when serving cached
  double request_rate = 1.0;  // beta, aggregate Poisson request rate

  void validate() const;  // throws std::invalid_argument unless all > 0
};

// What the cache can observe about one content: elapsed time since the last
// fetch, whether a copy is cached, and whether it is the content requested at
// the current epoch. Uncached states carry tau = 0, so the reachable states
// are exactly (tau,1,1), (tau,1,0), (0,1) and (0,0).
struct ObservedState {
  double tau = 0.0;
  bool cached = false;
  bool requested = false;

  static ObservedState cached_state(double tau, bool requested) {
    return ObservedState{tau, true, requested};
  }
  static ObservedState uncached(bool requested) {
    return ObservedState{0.0, false, requested};
  }
};

// The four per-content actions. ServeKeep doubles as plain "keep" for
// contents that are cached but not requested; FetchCache and FetchDiscard are
// admissible only for the requested content.
enum class Action {
  ServeKeep = 0,
  FetchCache = 1,
  Discard = 2,
  FetchDiscard = 3,
};

const char* to_string(Action a);

// Regime of the single-content optimal policy as a function of the holding
// cost: free holding, interior, or above the index cap I.
enum class Regime { Zero, Interior, AboveCap };

const char* to_string(Regime r);

// Threshold family of one content at one holding cost:
//   tau_star  refresh threshold when holding is free
//   tau_zero  staleness break-even c_f / (c_a * lambda)
//   tau_bar   keep/discard threshold
//   tau_tilde discard/refetch threshold
//   index_cap holding cost I above which the content is never kept
struct ThresholdSet {
  double tau_bar = 0.0;
  double tau_tilde = 0.0;
  double tau_star = 0.0;
  double tau_zero = 0.0;
  double index_cap = 0.0;
  double holding_cost = 0.0;
  Regime regime = Regime::Zero;
};

struct Catalog {
  std::vector<ContentParams> contents;
  int cache_capacity = 1;  // M, 1 <= M <= N

  int size() const { return static_cast<int>(contents.size()); }
  void validate() const;  // popularity sums to 1, rates nonnegative, 1 <= M <= N
};

// Zipf catalog: popularity ~ n^-alpha normalized by exact partial sums,
// update rates uniform or given per content. Rejects alpha < 0, negative
// rates, n < 2 and M >= n.
Catalog build_catalog(int n_contents, double zipf_alpha, double lambda,
                      int cache_capacity);
Catalog build_catalog(int n_contents, double zipf_alpha,
                      const std::vector<double>& lambdas, int cache_capacity);

// State-wise optimal action for the given holding cost. Boundary points go to
// the keep-side action (ServeKeep at tau_bar, Discard at tau_tilde) and
// holding_cost >= index_cap selects the discard regime. Rejects the state
// (0,0), which has no action.
Action classify_action(const ObservedState& s, const ThresholdSet& t,
                       double holding_cost);

}  // namespace fresh
