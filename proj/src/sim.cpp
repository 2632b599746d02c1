#include "freshcache/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "freshcache/parallel.hpp"
#include "freshcache/rng.hpp"
#include "freshcache/solver.hpp"

namespace fresh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// RNG stream tags; per-content age streams start at kAovStreamBase + index.
constexpr uint64_t kArrivalStream = 1;
constexpr uint64_t kSelectionStream = 2;
constexpr uint64_t kInitStream = 3;
constexpr uint64_t kAovStreamBase = 1000;

int sample_content(double u, const std::vector<double>& cdf) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                   cdf.size() - 1));
}

struct PerContent {
  double p = 0.0;
  double lambda = 0.0;
  double refresh_after = kInf;  // tau_star
  double cap = 0.0;             // index cap I
};

std::vector<PerContent> precompute(const Catalog& catalog,
                                   const CostModel& cost) {
  std::vector<PerContent> per;
  per.reserve(catalog.contents.size());
  for (const auto& c : catalog.contents) {
    if (c.popularity > 0.0)
      per.push_back({c.popularity, c.lambda, tau_star(c.popularity, cost, c.lambda),
                     index_cap(c.popularity, cost, c.lambda)});
    else  // never requested: free to evict, nothing to refresh
      per.push_back({0.0, c.lambda, kInf, 0.0});
  }
  return per;
}

class WhittlePolicy final : public Policy {
 public:
  WhittlePolicy(const Catalog& catalog, const CostModel& cost)
      : cost_(cost), per_(precompute(catalog, cost)) {}

  HitAction decide_hit(int content_id, double tau) const override {
    return tau > per_[content_id - 1].refresh_after ? HitAction::FetchCache
                                                    : HitAction::ServeKeep;
  }

  int decide_miss(int requested_id,
                  const std::vector<CachedView>& cached) const override {
    // Requested content enters the comparison at its cap W((0,1)) = I.
    double best_w = per_[requested_id - 1].cap;
    int best_id = requested_id;
    for (const auto& v : cached) {
      const auto& pc = per_[v.content_id - 1];
      double w = 0.0;
      if (pc.p > 0.0 && v.tau < pc.refresh_after)
        w = whittle_index_fast(v.tau, pc.p, cost_, pc.lambda);
      if (w < best_w || (w == best_w && v.content_id > best_id)) {
        best_w = w;
        best_id = v.content_id;
      }
    }
    return best_id;
  }

  const char* name() const override { return "whittle"; }

 private:
  CostModel cost_;
  std::vector<PerContent> per_;
};

class PopularPolicy final : public Policy {
 public:
  PopularPolicy(const Catalog& catalog, const CostModel& cost)
      : per_(precompute(catalog, cost)), in_top_(catalog.contents.size(), 0) {
    std::vector<int> order(catalog.contents.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return catalog.contents[a].popularity > catalog.contents[b].popularity;
    });
    for (int i = 0; i < catalog.cache_capacity; ++i) in_top_[order[i]] = 1;
  }

  HitAction decide_hit(int content_id, double tau) const override {
    return tau > per_[content_id - 1].refresh_after ? HitAction::FetchCache
                                                    : HitAction::ServeKeep;
  }

  int decide_miss(int requested_id,
                  const std::vector<CachedView>& cached) const override {
    if (!in_top_[requested_id - 1]) return requested_id;
    // Requested content belongs to the static set (possible with a random
    // initial cache): displace the least popular outsider.
    int victim = requested_id;
    double victim_p = kInf;
    for (const auto& v : cached) {
      if (in_top_[v.content_id - 1]) continue;
      const double p = per_[v.content_id - 1].p;
      if (p < victim_p || (p == victim_p && v.content_id > victim)) {
        victim = v.content_id;
        victim_p = p;
      }
    }
    return victim;
  }

  const char* name() const override { return "popular"; }

 private:
  std::vector<PerContent> per_;
  std::vector<char> in_top_;
};

class AlwaysFetchPolicy final : public Policy {
 public:
  HitAction decide_hit(int, double) const override {
    return HitAction::FetchCache;
  }
  int decide_miss(int requested_id,
                  const std::vector<CachedView>&) const override {
    return requested_id;
  }
  const char* name() const override { return "alwaysfetch"; }
};

}  // namespace

std::unique_ptr<Policy> make_whittle_policy(const Catalog& catalog,
                                            const CostModel& cost) {
  return std::make_unique<WhittlePolicy>(catalog, cost);
}

std::unique_ptr<Policy> make_popular_baseline(const Catalog& catalog,
                                              const CostModel& cost) {
  return std::make_unique<PopularPolicy>(catalog, cost);
}

std::unique_ptr<Policy> make_always_fetch_policy() {
  return std::make_unique<AlwaysFetchPolicy>();
}

SimReport run(const Catalog& catalog, const CostModel& cost,
              const Policy& policy, double horizon, double warmup,
              uint64_t seed, SimOptions opts) {
  catalog.validate();
  cost.validate();
  if (!(warmup >= 0.0) || !(horizon > warmup))
    throw std::invalid_argument("need horizon > warmup >= 0");

  const int n = catalog.size();
  const int m = catalog.cache_capacity;
  const double beta = cost.request_rate;

  Rng arrivals(derive_seed(seed, kArrivalStream));
  Rng selection(derive_seed(seed, kSelectionStream));
  std::vector<Rng> aov_stream;
  aov_stream.reserve(n);
  for (int i = 0; i < n; ++i)
    aov_stream.emplace_back(derive_seed(seed, kAovStreamBase + i));

  std::vector<double> cdf(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += catalog.contents[i].popularity;
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  // slot_of maps 0-based content index to its cache slot, -1 if uncached.
  std::vector<CacheEntry> entries;
  entries.reserve(m);
  std::vector<int> slot_of(n, -1);
  if (opts.random_init) {
    Rng init(derive_seed(seed, kInitStream));
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    for (int i = 0; i < m; ++i) {  // partial Fisher-Yates
      const int j = i + static_cast<int>(init.u01() * (n - i));
      std::swap(ids[i], ids[std::min(j, n - 1)]);
      const double age = init.exponential(beta);
      slot_of[ids[i]] = static_cast<int>(entries.size());
      entries.push_back(CacheEntry{ids[i] + 1, -age, 0, -age});
    }
  } else {
    for (int i = 0; i < m; ++i) {
      slot_of[i] = static_cast<int>(entries.size());
      entries.push_back(CacheEntry{i + 1, 0.0, 0, 0.0});
    }
  }

  double t = 0.0;
  long fetch_count = 0;
  double served_aov = 0.0;  // sum of latent ages at serve events
  long requests = 0, hits = 0, hit_fetches = 0;
  std::vector<CachedView> views(m);

  for (;;) {
    t += arrivals.exponential(beta);
    if (t > horizon) break;
    const bool measured = t > warmup;
    const int e = sample_content(selection.u01(), cdf);
    if (measured) ++requests;

    const int slot = slot_of[e];
    if (slot >= 0) {
      CacheEntry& ent = entries[slot];
      const double tau = t - ent.fetch_time;
      if (measured) ++hits;
      if (policy.decide_hit(e + 1, tau) == HitAction::ServeKeep) {
        const double gap = t - ent.aov_sampled_up_to;
        ent.latent_aov +=
            aov_stream[e].poisson(catalog.contents[e].lambda * gap);
        ent.aov_sampled_up_to = t;
        if (measured) served_aov += static_cast<double>(ent.latent_aov);
      } else {
        ent.fetch_time = t;
        ent.latent_aov = 0;
        ent.aov_sampled_up_to = t;
        if (measured) {
          ++fetch_count;
          ++hit_fetches;
        }
      }
    } else {
      if (measured) ++fetch_count;  // fetch to serve the miss
      for (int i = 0; i < m; ++i)
        views[i] = CachedView{entries[i].content_id,
                              t - entries[i].fetch_time};
      const int victim = policy.decide_miss(e + 1, views);
      if (victim != e + 1) {
        const int vs = slot_of[victim - 1];
        if (vs < 0)
          throw std::logic_error("policy evicted a content that is not cached");
        slot_of[victim - 1] = -1;
        entries[vs] = CacheEntry{e + 1, t, 0, t};
        slot_of[e] = vs;
      }
    }
  }

  const double window = horizon - warmup;
  SimReport r;
  r.horizon = horizon;
  r.warmup = warmup;
  r.fetch_cost_rate = cost.fetch_cost * static_cast<double>(fetch_count) / window;
  r.ageing_cost_rate = cost.ageing_cost * served_aov / window;
  r.avg_cost_rate = r.fetch_cost_rate + r.ageing_cost_rate;
  r.hit_rate = requests > 0 ? static_cast<double>(hits) / requests : 0.0;
  r.fetch_on_hit_rate = hits > 0 ? static_cast<double>(hit_fetches) / hits : 0.0;
  r.request_count = requests;
  r.seed = seed;
  return r;
}

namespace {

FieldStats stats_of(const std::vector<double>& xs) {
  const int n = static_cast<int>(xs.size());
  FieldStats f;
  for (double x : xs) f.mean += x;
  f.mean /= n;
  if (n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - f.mean) * (x - f.mean);
    f.stddev = std::sqrt(ss / (n - 1));
    f.ci95 = 1.96 * f.stddev / std::sqrt(static_cast<double>(n));
  }
  return f;
}

}  // namespace

ReplicateSummary replicate_with_seeds(const Catalog& catalog,
                                      const CostModel& cost,
                                      const Policy& policy, double horizon,
                                      double warmup,
                                      const std::vector<uint64_t>& seeds,
                                      int jobs, SimOptions opts) {
  const int n = static_cast<int>(seeds.size());
  if (n < 2) throw std::invalid_argument("need at least 2 replications");
  std::vector<SimReport> reports(n);
  parallel_for(n, jobs, [&](int i) {
    reports[i] = run(catalog, cost, policy, horizon, warmup, seeds[i], opts);
  });

  std::vector<double> a(n), b(n), c(n), d(n), e(n);
  for (int i = 0; i < n; ++i) {
    a[i] = reports[i].avg_cost_rate;
    b[i] = reports[i].fetch_cost_rate;
    c[i] = reports[i].ageing_cost_rate;
    d[i] = reports[i].hit_rate;
    e[i] = reports[i].fetch_on_hit_rate;
  }
  ReplicateSummary s;
  s.avg_cost_rate = stats_of(a);
  s.fetch_cost_rate = stats_of(b);
  s.ageing_cost_rate = stats_of(c);
  s.hit_rate = stats_of(d);
  s.fetch_on_hit_rate = stats_of(e);
  s.replications = n;
  return s;
}

ReplicateSummary replicate(const Catalog& catalog, const CostModel& cost,
                           const Policy& policy, double horizon, double warmup,
                           int n_replications, uint64_t master_seed, int jobs,
                           SimOptions opts) {
  if (n_replications < 2)
    throw std::invalid_argument("need at least 2 replications");
  std::vector<uint64_t> seeds(n_replications);
  for (int i = 0; i < n_replications; ++i)
    seeds[i] = derive_seed(master_seed, static_cast<uint64_t>(i));
  ReplicateSummary s = replicate_with_seeds(catalog, cost, policy, horizon,
                                            warmup, seeds, jobs, opts);
  s.master_seed = master_seed;
  return s;
}

}  // namespace fresh
