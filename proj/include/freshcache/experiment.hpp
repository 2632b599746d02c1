#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "freshcache/model.hpp"
#include "freshcache/sim.hpp"
#include "freshcache/solver.hpp"

namespace fresh {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSeedEnvVar = "FRESH_RMAB_SEED";

// A sweep is the cross product of cache_sizes x lambdas x fetch_costs, run
// for every policy with common random numbers.
struct ExperimentConfig {
  int n_contents = 100;
  double zipf_alpha = 1.0;
  std::vector<double> lambdas = {0.01};
  std::vector<int> cache_sizes = {10};
  std::vector<double> fetch_costs = {1.0};
  double ageing_cost = 0.1;
  double request_rate = 5.0;
  std::vector<std::string> policies = {"whittle"};
  double horizon = 20000.0;
  double warmup = -1.0;  // < 0 means horizon / 10
  int replications = 10;
  uint64_t seed = 1;
  bool lower_bound = true;
  bool random_init = false;
  std::string preset;  // informational
  std::string scale;   // informational

  double effective_warmup() const { return warmup < 0 ? horizon / 10.0 : warmup; }
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Named experiment recipes; scale is "desk" (N = 100, short horizon) or
// "paper" (N = 1000).
//   fig3   cost vs cache size, lambda = 0.01, c_f = 1
//   fig4a  cost vs cache size for lambda in {0.01, 2, 5}, c_f = 5
//   fig4b  fetch/ageing decomposition at lambda = 2, c_f = 5
//   fig6   cost vs cache size for c_f in {1, 2, 5}, lambda = 2
ExperimentConfig preset_config(const std::string& name,
                               const std::string& scale);
std::vector<std::string> preset_names();

// key = value text format, '#' comments; unknown keys are errors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// FNV-1a over the canonical serialization (16 hex digits).
std::string config_hash(const ExperimentConfig& cfg);

struct SweepPoint {
  int cache_size = 0;
  double lambda = 0.0;
  double fetch_cost = 0.0;
  bool operator==(const SweepPoint&) const = default;
};

struct SweepRow {
  std::string policy;
  SweepPoint point;
  ReplicateSummary stats;
  double lower_bound = 0.0;  // NaN when not computed
  double ch_opt = 0.0;
  uint64_t seed = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string hash;
  std::string timestamp;
  std::vector<SweepRow> rows;
};

struct LbRow {
  SweepPoint point;
  double lower_bound = 0.0;
  double ch_opt = 0.0;
};

Catalog catalog_for(const ExperimentConfig& cfg, int cache_size,
                    double lambda);
CostModel cost_for(const ExperimentConfig& cfg, double fetch_cost);
// Known names: whittle, popular, alwaysfetch.
std::unique_ptr<Policy> make_policy(const std::string& name,
                                    const Catalog& catalog,
                                    const CostModel& cost);

// Runs every (sweep point, policy) pair with common random numbers;
// jobs limits concurrency. Rows come back sorted by (cache_size, lambda,
// fetch_cost, policy).
ExperimentReport run_sweep(const ExperimentConfig& cfg, int jobs = 1);

std::vector<LbRow> run_lb(const ExperimentConfig& cfg);

// CSV with a fixed, documented column order; 12 significant digits, '.'
// decimal separator, no timestamps (reruns are byte-identical).
void write_sweep_csv(std::ostream& out, const ExperimentReport& report);
void write_lb_csv(std::ostream& out, const ExperimentConfig& cfg,
                  const std::vector<LbRow>& rows);

// JSON report (round-trips exactly; timestamp lives here, not in the CSV).
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);

// Minimal line chart of mean cost vs cache size, one polyline per
// (policy, lambda, fetch_cost) series plus the lower bound.
void write_sweep_svg(std::ostream& out, const ExperimentReport& report);

std::string format_sig(double value, int digits = 12);

}  // namespace fresh
