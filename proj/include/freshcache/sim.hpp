#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "freshcache/model.hpp"

namespace fresh {

// One cached content. The age-of-version is latent: it is advanced lazily by
// Poisson increments only when the copy is actually served, which is exact in
// distribution because origin updates are independent Poisson processes.
struct CacheEntry {
  int content_id = 0;
  double fetch_time = 0.0;
  long latent_aov = 0;
  double aov_sampled_up_to = 0.0;
};

// Observable slice of a cache entry handed to policies.
struct CachedView {
  int content_id = 0;
  double tau = 0.0;
};

enum class HitAction { ServeKeep, FetchCache };

// Caching policy. Decisions may depend only on the arguments (ids and elapsed
// ages) -- the latent update counts are never exposed.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual HitAction decide_hit(int content_id, double tau) const = 0;
  // Returns the id to evict among cached ++ {requested}; returning the
  // requested id means serve-and-discard.
  virtual int decide_miss(int requested_id,
                          const std::vector<CachedView>& cached) const = 0;
  virtual const char* name() const = 0;
};

struct SimReport {
  double horizon = 0.0;
  double warmup = 0.0;
  double avg_cost_rate = 0.0;
  double fetch_cost_rate = 0.0;
  double ageing_cost_rate = 0.0;
  double hit_rate = 0.0;
  double fetch_on_hit_rate = 0.0;
  long request_count = 0;
  uint64_t seed = 0;

  bool operator==(const SimReport&) const = default;
};

struct SimOptions {
  bool random_init = false;  // random cache set and elapsed ages at t = 0
};

// Event-driven run over Poisson(beta) request epochs; costs and statistics
// are measured on (warmup, horizon]. Bit-identical for a fixed seed.
SimReport run(const Catalog& catalog, const CostModel& cost,
              const Policy& policy, double horizon, double warmup,
              uint64_t seed, SimOptions opts = {});

// Index policy: refresh a hit once its age passes tau_star, and on a miss
// evict the content with the least Whittle index among cached and requested.
std::unique_ptr<Policy> make_whittle_policy(const Catalog& catalog,
                                            const CostModel& cost);

// Static most-popular caching: top-M contents are pinned (refreshed past
// tau_star); every other request is served and discarded.
std::unique_ptr<Policy> make_popular_baseline(const Catalog& catalog,
                                              const CostModel& cost);

// Pays c_f on every request: refetches hits, discards fetched misses.
std::unique_ptr<Policy> make_always_fetch_policy();

struct FieldStats {
  double mean = 0.0;
  double stddev = 0.0;
  double ci95 = 0.0;  // normal-approximation half width
};

struct ReplicateSummary {
  FieldStats avg_cost_rate, fetch_cost_rate, ageing_cost_rate;
  FieldStats hit_rate, fetch_on_hit_rate;
  int replications = 0;
  uint64_t master_seed = 0;
};

// Independent replications with seeds derived deterministically from the
// master seed; jobs > 1 runs them concurrently (reports are merged in
// replication order either way).
ReplicateSummary replicate(const Catalog& catalog, const CostModel& cost,
                           const Policy& policy, double horizon, double warmup,
                           int n_replications, uint64_t master_seed,
                           int jobs = 1, SimOptions opts = {});

// Same, with caller-provided per-replication seeds.
ReplicateSummary replicate_with_seeds(const Catalog& catalog,
                                      const CostModel& cost,
                                      const Policy& policy, double horizon,
                                      double warmup,
                                      const std::vector<uint64_t>& seeds,
                                      int jobs = 1, SimOptions opts = {});

}  // namespace fresh
