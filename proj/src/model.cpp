#include "freshcache/model.hpp"

#include <cmath>
#include <stdexcept>

namespace fresh {

void CostModel::validate() const {
  if (!(fetch_cost > 0.0)) throw std::invalid_argument("fetch_cost must be > 0");
  if (!(ageing_cost > 0.0)) throw std::invalid_argument("ageing_cost must be > 0");
  if (!(request_rate > 0.0)) throw std::invalid_argument("request_rate must be > 0");
}

const char* to_string(Action a) {
  switch (a) {
    case Action::ServeKeep: return "serve-keep";
    case Action::FetchCache: return "fetch-cache";
    case Action::Discard: return "discard";
    case Action::FetchDiscard: return "fetch-discard";
  }
  return "?";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Zero: return "zero";
    case Regime::Interior: return "interior";
    case Regime::AboveCap: return "above-cap";
  }
  return "?";
}

void Catalog::validate() const {
  const int n = size();
  if (n < 1) throw std::invalid_argument("catalog is empty");
  if (cache_capacity < 1 || cache_capacity > n)
    throw std::invalid_argument("cache_capacity must be in [1, N]");
  double total = 0.0;
  for (const auto& c : contents) {
    if (!(c.lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    if (!(c.popularity >= 0.0 && c.popularity <= 1.0))
      throw std::invalid_argument("popularity must be in [0, 1]");
    total += c.popularity;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("popularities must sum to 1");
}

Catalog build_catalog(int n_contents, double zipf_alpha,
                      const std::vector<double>& lambdas, int cache_capacity) {
  if (n_contents < 2) throw std::invalid_argument("need at least 2 contents");
  if (cache_capacity < 1 || cache_capacity >= n_contents)
    throw std::invalid_argument("cache_capacity must satisfy 1 <= M < N");
  if (zipf_alpha < 0.0) throw std::invalid_argument("zipf_alpha must be >= 0");
  if (static_cast<int>(lambdas.size()) != n_contents)
    throw std::invalid_argument("need one update rate per content");

  Catalog cat;
  cat.cache_capacity = cache_capacity;
  cat.contents.resize(n_contents);

  // Exact partial sum, no harmonic-number shortcut.
  double norm = 0.0;
  for (int n = 1; n <= n_contents; ++n) norm += std::pow(n, -zipf_alpha);
  for (int n = 1; n <= n_contents; ++n) {
    const double rate = lambdas[n - 1];
    if (!(rate >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    cat.contents[n - 1] =
        ContentParams{n, rate, std::pow(n, -zipf_alpha) / norm};
  }
  return cat;
}

Catalog build_catalog(int n_contents, double zipf_alpha, double lambda,
                      int cache_capacity) {
  if (n_contents < 2) throw std::invalid_argument("need at least 2 contents");
  return build_catalog(n_contents, zipf_alpha,
                       std::vector<double>(n_contents, lambda), cache_capacity);
}

Action classify_action(const ObservedState& s, const ThresholdSet& t,
                       double holding_cost) {
  if (!s.cached && !s.requested)
    throw std::invalid_argument("state (0,0) has no action");

  const bool above_cap = holding_cost >= t.index_cap;

  if (!s.cached)  // state (0,1)
    return above_cap ? Action::FetchDiscard : Action::FetchCache;

  if (above_cap) {
    if (!s.requested) return Action::Discard;
    return s.tau <= t.tau_zero ? Action::Discard : Action::FetchDiscard;
  }

  if (holding_cost == 0.0) {
    if (!s.requested) return Action::ServeKeep;
    return s.tau <= t.tau_star ? Action::ServeKeep : Action::FetchCache;
  }

  // interior: keep up to tau_bar, discard on (tau_bar, tau_tilde], refetch past
  if (!s.requested)
    return s.tau <= t.tau_bar ? Action::ServeKeep : Action::Discard;
  if (s.tau <= t.tau_bar) return Action::ServeKeep;
  if (s.tau <= t.tau_tilde) return Action::Discard;
  return Action::FetchCache;
}

}  // namespace fresh
