// freshcache: Whittle-index caching toolkit.
//   index  closed-form thresholds and indices for one content
//   sweep  simulate policies over a parameter sweep, CSV/JSON (+SVG) out
//   lb     Lagrangian lower bound per sweep point
//   rvi    verify closed forms against relative value iteration
//   sim    one simulation run

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "freshcache/dp.hpp"
#include "freshcache/experiment.hpp"
#include "freshcache/model.hpp"
#include "freshcache/sim.hpp"
#include "freshcache/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;

struct SingleContentArgs {
  double p = 0.5;
  double beta = 2.0;
  double cf = 1.0;
  double ca = 1.0;
  double lambda = 1.0;
};

void add_content_options(CLI::App* cmd, SingleContentArgs& a) {
  cmd->add_option("--p", a.p, "request probability")->check(CLI::Range(1e-12, 1.0));
  cmd->add_option("--beta", a.beta, "aggregate request rate");
  cmd->add_option("--cf", a.cf, "fetch cost");
  cmd->add_option("--ca", a.ca, "ageing cost per update");
  cmd->add_option("--lambda", a.lambda, "update rate");
}

uint64_t resolve_seed(const std::optional<uint64_t>& cli_seed,
                      uint64_t fallback) {
  if (cli_seed) return *cli_seed;
  if (const char* env = std::getenv(fresh::kSeedEnvVar))
    return std::stoull(env);
  return fallback;
}

int cmd_index(const SingleContentArgs& a, int rows, const std::string& out_path) {
  const fresh::CostModel cost{a.cf, a.ca, a.beta};
  const double cap = fresh::index_cap(a.p, cost, a.lambda);
  std::ostringstream out;
  out << "ch,tau_bar,tau_tilde,tau_star,tau_zero,theta\n";
  for (int i = 0; i < rows; ++i) {
    const double ch = cap * i / (rows - 1);
    const auto t = fresh::thresholds(ch, a.p, cost, a.lambda);
    const auto rv = fresh::relaxed_value(ch, a.p, cost, a.lambda);
    out << fresh::format_sig(ch) << ',' << fresh::format_sig(t.tau_bar) << ','
        << fresh::format_sig(t.tau_tilde) << ','
        << fresh::format_sig(t.tau_star) << ','
        << fresh::format_sig(t.tau_zero) << ',' << fresh::format_sig(rv.theta)
        << '\n';
  }
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << out.str();
    std::cout << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_rvi(const SingleContentArgs& a, double ch, double step, double tau_max,
            double epsilon, int max_iters) {
  const fresh::CostModel cost{a.cf, a.ca, a.beta};
  fresh::GridConfig grid;
  if (step > 0 && tau_max > 0) {
    grid = {step, tau_max};
  } else if (a.lambda > 0) {
    grid = fresh::default_grid(cost, a.lambda);
    if (step > 0) grid.step = step;
    if (tau_max > 0) grid.tau_max = tau_max;
  } else {
    std::cerr << "error: lambda = 0 needs explicit --step and --tau-max\n";
    return kExitUsage;
  }
  if (epsilon <= 0) epsilon = 1e-9 * a.beta * a.cf;

  const auto model = fresh::discretize(a.p, cost, a.lambda, ch, grid);
  const auto table = fresh::rvi_solve(model, epsilon, max_iters);
  fresh::ThresholdScan scan;
  try {
    scan = fresh::extract_thresholds(model, table);
  } catch (const std::runtime_error& e) {
    std::cout << e.what() << "\nverification FAILED\n";
    return kExitVerification;
  }
  const auto rv = fresh::relaxed_value(ch, a.p, cost, a.lambda);
  const auto ts = fresh::thresholds(ch, a.p, cost, a.lambda);

  const double theta_err =
      rv.theta != 0.0 ? std::fabs(table.theta_hat - rv.theta) / rv.theta
                      : std::fabs(table.theta_hat);
  bool ok = theta_err <= 0.02;

  std::cout << "regime            " << fresh::to_string(scan.regime) << "\n";
  std::cout << "iterations        " << table.iterations << " (span "
            << table.final_span << ")\n";
  std::cout << "theta closed-form " << fresh::format_sig(rv.theta) << "\n";
  std::cout << "theta rvi         " << fresh::format_sig(table.theta_hat)
            << "  (rel err " << fresh::format_sig(theta_err, 3) << ")\n";
  const auto check_tau = [&](const char* name, double closed, double hat) {
    if (std::isnan(hat)) return;
    const double err = std::fabs(hat - closed);
    const bool pass = err <= model.step + 1e-12;
    ok = ok && pass;
    std::cout << name << " closed " << fresh::format_sig(closed, 8) << "  rvi "
              << fresh::format_sig(hat, 8) << "  |diff| "
              << fresh::format_sig(err, 3) << (pass ? "" : "  BREACH") << "\n";
  };
  check_tau("tau_star ", ts.tau_star, scan.tau_star_hat);
  check_tau("tau_bar  ", ts.tau_bar, scan.tau_bar_hat);
  check_tau("tau_tilde", ts.tau_tilde, scan.tau_tilde_hat);
  check_tau("tau_zero ", ts.tau_zero, scan.tau_zero_hat);
  if (theta_err > 0.02) std::cout << "theta BREACH (tolerance 2%)\n";
  std::cout << (ok ? "verification passed\n" : "verification FAILED\n");
  return ok ? kExitOk : kExitVerification;
}

fresh::ExperimentConfig load_config(const std::string& config_path,
                                    const std::string& preset,
                                    const std::string& scale) {
  if (!config_path.empty() && !preset.empty())
    throw std::invalid_argument("use either --config or --preset, not both");
  if (!config_path.empty()) return fresh::parse_config_file(config_path);
  if (!preset.empty()) return fresh::preset_config(preset, scale);
  throw std::invalid_argument("need --config <path> or --preset <name>");
}

std::string base_name(const fresh::ExperimentConfig& cfg) {
  if (cfg.preset.empty() || cfg.preset == "custom")
    return "sweep_" + fresh::config_hash(cfg);
  return cfg.preset + "_" + (cfg.scale.empty() ? "desk" : cfg.scale);
}

int cmd_sweep(const std::string& config_path, const std::string& preset,
              const std::string& scale, std::optional<uint64_t> seed, int jobs,
              bool svg, const std::string& out_dir) {
  fresh::ExperimentConfig cfg = load_config(config_path, preset, scale);
  cfg.seed = resolve_seed(seed, cfg.seed);
  const auto report = fresh::run_sweep(cfg, jobs);

  std::filesystem::create_directories(out_dir);
  const std::string base = (std::filesystem::path(out_dir) / base_name(cfg)).string();
  {
    std::ofstream csv(base + ".csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + base + ".csv");
    fresh::write_sweep_csv(csv, report);
  }
  {
    std::ofstream js(base + ".json", std::ios::binary);
    js << fresh::report_to_json(report) << "\n";
  }
  if (svg) {
    std::ofstream sv(base + ".svg", std::ios::binary);
    fresh::write_sweep_svg(sv, report);
  }
  std::cout << "wrote " << base << ".csv / .json" << (svg ? " / .svg" : "")
            << "  (" << report.rows.size() << " rows, seed " << cfg.seed
            << ", hash " << report.hash << ")\n";
  for (const auto& r : report.rows) {
    std::cout << "  " << r.policy << " M=" << r.point.cache_size
              << " lambda=" << r.point.lambda << " cf=" << r.point.fetch_cost
              << "  cost " << fresh::format_sig(r.stats.avg_cost_rate.mean, 6)
              << " +- " << fresh::format_sig(r.stats.avg_cost_rate.ci95, 3);
    if (!std::isnan(r.lower_bound))
      std::cout << "  lb " << fresh::format_sig(r.lower_bound, 6);
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_lb(const std::string& config_path, const std::string& preset,
           const std::string& scale, const std::string& out_path) {
  const fresh::ExperimentConfig cfg = load_config(config_path, preset, scale);
  const auto rows = fresh::run_lb(cfg);
  std::ostringstream out;
  fresh::write_lb_csv(out, cfg, rows);
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << out.str();
    std::cout << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_sim(int n, double alpha, int m, double lambda, double cf, double ca,
            double beta, const std::string& policy_name, double horizon,
            double warmup, std::optional<uint64_t> seed, bool random_init) {
  const auto catalog = fresh::build_catalog(n, alpha, lambda, m);
  const fresh::CostModel cost{cf, ca, beta};
  const auto policy = fresh::make_policy(policy_name, catalog, cost);
  if (warmup < 0) warmup = horizon / 10.0;
  const auto report =
      fresh::run(catalog, cost, *policy, horizon, warmup,
                 resolve_seed(seed, 1), fresh::SimOptions{random_init});
  nlohmann::json j{{"policy", policy_name},
                   {"horizon", report.horizon},
                   {"warmup", report.warmup},
                   {"avg_cost_rate", report.avg_cost_rate},
                   {"fetch_cost_rate", report.fetch_cost_rate},
                   {"ageing_cost_rate", report.ageing_cost_rate},
                   {"hit_rate", report.hit_rate},
                   {"fetch_on_hit_rate", report.fetch_on_hit_rate},
                   {"request_count", report.request_count},
                   {"seed", report.seed}};
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whittle-index caching for dynamic contents"};
  app.require_subcommand(1);

  // index
  auto* index = app.add_subcommand("index", "closed-form thresholds and indices");
  SingleContentArgs index_args;
  add_content_options(index, index_args);
  int index_rows = 21;
  std::string index_out;
  index->add_option("--rows", index_rows, "holding-cost grid rows")
      ->check(CLI::Range(2, 100000));
  index->add_option("--out", index_out, "write CSV here instead of stdout");

  // rvi
  auto* rvi = app.add_subcommand("rvi", "verify against relative value iteration");
  SingleContentArgs rvi_args;
  add_content_options(rvi, rvi_args);
  double rvi_ch = 0.2, rvi_step = -1, rvi_tau_max = -1, rvi_eps = -1;
  int rvi_iters = 100000;
  rvi->add_option("--ch", rvi_ch, "holding cost")->check(CLI::NonNegativeNumber);
  rvi->add_option("--step", rvi_step, "tau grid step");
  rvi->add_option("--tau-max", rvi_tau_max, "tau grid upper end");
  rvi->add_option("--epsilon", rvi_eps, "span tolerance");
  rvi->add_option("--max-iters", rvi_iters, "sweep cap");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a policy sweep");
  std::string sweep_config, sweep_preset, sweep_scale = "desk", sweep_out = ".";
  std::optional<uint64_t> sweep_seed;
  int sweep_jobs = 0;
  bool sweep_svg = false;
  sweep->add_option("--config", sweep_config, "config file (key = value)");
  sweep->add_option("--preset", sweep_preset, "fig3|fig4a|fig4b|fig6");
  sweep->add_option("--scale", sweep_scale, "desk|paper")->capture_default_str();
  sweep->add_option("--seed", sweep_seed, "master seed (or FRESH_RMAB_SEED)");
  sweep->add_option("--jobs", sweep_jobs, "max concurrent runs (0 = all cores)");
  sweep->add_flag("--svg", sweep_svg, "also write an SVG chart");
  sweep->add_option("--out", sweep_out, "output directory")->capture_default_str();

  // lb
  auto* lb = app.add_subcommand("lb", "Lagrangian lower bound per sweep point");
  std::string lb_config, lb_preset, lb_scale = "desk", lb_out;
  lb->add_option("--config", lb_config, "config file");
  lb->add_option("--preset", lb_preset, "fig3|fig4a|fig4b|fig6");
  lb->add_option("--scale", lb_scale, "desk|paper")->capture_default_str();
  lb->add_option("--out", lb_out, "write CSV here instead of stdout");

  // sim
  auto* sim = app.add_subcommand("sim", "single simulation run");
  int sim_n = 100, sim_m = 10;
  double sim_alpha = 1.0, sim_lambda = 0.01, sim_cf = 1.0, sim_ca = 0.1,
         sim_beta = 5.0, sim_horizon = 20000.0, sim_warmup = -1.0;
  std::string sim_policy = "whittle";
  std::optional<uint64_t> sim_seed;
  bool sim_random_init = false;
  sim->add_option("--n", sim_n, "catalog size");
  sim->add_option("--alpha", sim_alpha, "zipf exponent");
  sim->add_option("--m", sim_m, "cache capacity");
  sim->add_option("--lambda", sim_lambda, "update rate");
  sim->add_option("--cf", sim_cf, "fetch cost");
  sim->add_option("--ca", sim_ca, "ageing cost");
  sim->add_option("--beta", sim_beta, "request rate");
  sim->add_option("--policy", sim_policy, "whittle|popular|alwaysfetch");
  sim->add_option("--horizon", sim_horizon, "simulated time");
  sim->add_option("--warmup", sim_warmup, "measurement start (default horizon/10)");
  sim->add_option("--seed", sim_seed, "seed (or FRESH_RMAB_SEED)");
  sim->add_flag("--random-init", sim_random_init, "random initial cache");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // collapse CLI11's exit-code zoo onto the documented 0/1 contract
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (index->parsed()) return cmd_index(index_args, index_rows, index_out);
    if (rvi->parsed())
      return cmd_rvi(rvi_args, rvi_ch, rvi_step, rvi_tau_max, rvi_eps, rvi_iters);
    if (sweep->parsed()) {
      const int jobs = sweep_jobs > 0
                           ? sweep_jobs
                           : static_cast<int>(std::thread::hardware_concurrency());
      return cmd_sweep(sweep_config, sweep_preset, sweep_scale, sweep_seed,
                       std::max(1, jobs), sweep_svg, sweep_out);
    }
    if (lb->parsed()) return cmd_lb(lb_config, lb_preset, lb_scale, lb_out);
    if (sim->parsed())
      return cmd_sim(sim_n, sim_alpha, sim_m, sim_lambda, sim_cf, sim_ca,
                     sim_beta, sim_policy, sim_horizon, sim_warmup, sim_seed,
                     sim_random_init);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
