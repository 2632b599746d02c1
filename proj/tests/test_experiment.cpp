#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "freshcache/experiment.hpp"

using namespace fresh;

TEST_CASE("presets echo the reference experiment grids") {
  SUBCASE("fig3 at paper scale") {
    const auto cfg = preset_config("fig3", "paper");
    CHECK(cfg.n_contents == 1000);
    CHECK(cfg.zipf_alpha == 1.0);
    CHECK(cfg.lambdas == std::vector<double>{0.01});
    CHECK(cfg.fetch_costs == std::vector<double>{1.0});
    CHECK(cfg.ageing_cost == 0.1);
    CHECK(cfg.request_rate == 5.0);
    CHECK(cfg.cache_sizes.front() == 40);
    CHECK(cfg.cache_sizes.back() == 100);
    CHECK(cfg.lower_bound);
    cfg.validate();
  }
  SUBCASE("fig4a sweeps the update rate") {
    const auto cfg = preset_config("fig4a", "desk");
    CHECK(cfg.lambdas == std::vector<double>{0.01, 2.0, 5.0});
    CHECK(cfg.fetch_costs == std::vector<double>{5.0});
  }
  SUBCASE("fig4b decomposes costs at lambda = 2") {
    const auto cfg = preset_config("fig4b", "desk");
    CHECK(cfg.lambdas == std::vector<double>{2.0});
    CHECK(cfg.fetch_costs == std::vector<double>{5.0});
  }
  SUBCASE("fig6 sweeps the fetch cost") {
    const auto cfg = preset_config("fig6", "desk");
    CHECK(cfg.fetch_costs == std::vector<double>{1.0, 2.0, 5.0});
    CHECK(cfg.lambdas == std::vector<double>{2.0});
  }
  SUBCASE("desk scale is small enough for minutes-long runs") {
    const auto cfg = preset_config("fig3", "desk");
    CHECK(cfg.n_contents == 100);
    CHECK(cfg.horizon == 20000.0);
    CHECK(cfg.replications == 10);
    CHECK(cfg.cache_sizes == std::vector<int>{4, 6, 8, 10});
  }
  CHECK_THROWS_AS(preset_config("fig9", "desk"), std::invalid_argument);
  CHECK_THROWS_AS(preset_config("fig3", "galactic"), std::invalid_argument);
}

TEST_CASE("config text parsing") {
  const std::string text = R"(
# comment
n_contents = 20
zipf_alpha = 1.0
lambda = 0.5
cache_sizes = 2, 4
fetch_cost = 1
ageing_cost = 0.5
request_rate = 3
policies = whittle, popular
horizon = 2000
replications = 3
seed = 9
lower_bound = true
)";
  const auto cfg = parse_config_text(text);
  CHECK(cfg.n_contents == 20);
  CHECK(cfg.cache_sizes == std::vector<int>{2, 4});
  CHECK(cfg.policies == std::vector<std::string>{"whittle", "popular"});
  CHECK(cfg.seed == 9);
  CHECK(cfg.effective_warmup() == 200.0);

  CHECK_THROWS_AS(parse_config_text("bogus_key = 1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("n_contents = banana"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("n_contents = 10\ncache_sizes = 10"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("policies = lru"), std::invalid_argument);
}

TEST_CASE("config hash is stable and sensitive") {
  const auto a = preset_config("fig3", "desk");
  auto b = a;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n_contents = 20;
  cfg.zipf_alpha = 1.0;
  cfg.lambdas = {0.5};
  cfg.cache_sizes = {2, 4};
  cfg.fetch_costs = {1.0};
  cfg.ageing_cost = 0.5;
  cfg.request_rate = 3.0;
  cfg.policies = {"whittle", "popular"};
  cfg.horizon = 2000.0;
  cfg.replications = 3;
  cfg.seed = 9;
  cfg.lower_bound = true;
  cfg.preset = "unit";
  cfg.scale = "unit";
  return cfg;
}

}  // namespace

TEST_CASE("sweep rows, determinism and serialization") {
  const auto cfg = small_config();
  const auto report = run_sweep(cfg, 2);
  REQUIRE(report.rows.size() == 4);  // 2 points x 2 policies

  SUBCASE("rows are sorted and carry the lower bound per point") {
    CHECK(report.rows[0].point.cache_size == 2);
    CHECK(report.rows[0].policy == "popular");
    CHECK(report.rows[1].policy == "whittle");
    CHECK(report.rows[2].point.cache_size == 4);
    for (const auto& r : report.rows) {
      CHECK(!std::isnan(r.lower_bound));
      CHECK(r.lower_bound > 0.0);
      CHECK(r.seed == cfg.seed);
      CHECK(r.stats.replications == 3);
    }
  }

  SUBCASE("larger cache never raises the lower bound") {
    CHECK(report.rows[2].lower_bound <= report.rows[0].lower_bound + 1e-12);
  }

  SUBCASE("rerun is byte-identical CSV") {
    const auto again = run_sweep(cfg, 1);
    std::ostringstream a, b;
    write_sweep_csv(a, report);
    write_sweep_csv(b, again);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("policy,cache_size,lambda,fetch_cost") == 0);
  }

  SUBCASE("json round-trips exactly") {
    const std::string j = report_to_json(report);
    const auto parsed = report_from_json(j);
    CHECK(report_to_json(parsed) == j);
    CHECK(parsed.config == cfg);
    CHECK(parsed.rows.size() == report.rows.size());
    CHECK(parsed.rows[1].stats.avg_cost_rate.mean ==
          report.rows[1].stats.avg_cost_rate.mean);
  }

  SUBCASE("svg output is a well-formed chart") {
    std::ostringstream svg;
    write_sweep_svg(svg, report);
    const std::string s = svg.str();
    CHECK(s.find("<svg") == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    CHECK(s.find("polyline") != std::string::npos);
    CHECK(s.find("whittle") != std::string::npos);
  }
}

TEST_CASE("lb rows match dual_lower_bound directly") {
  auto cfg = small_config();
  cfg.policies = {"whittle"};
  const auto rows = run_lb(cfg);
  REQUIRE(rows.size() == 2);
  const auto direct = dual_lower_bound(
      catalog_for(cfg, cfg.cache_sizes[0], cfg.lambdas[0]),
      cost_for(cfg, cfg.fetch_costs[0]));
  CHECK(rows[0].lower_bound == doctest::Approx(direct.lower_bound).epsilon(1e-12));
  CHECK(rows[0].ch_opt == doctest::Approx(direct.ch_opt).epsilon(1e-9));
  std::ostringstream out;
  write_lb_csv(out, cfg, rows);
  CHECK(out.str().find("cache_size,lambda,fetch_cost") == 0);
}

TEST_CASE("format_sig keeps 12 significant digits") {
  CHECK(format_sig(1.0) == "1");
  CHECK(format_sig(0.844887875800) == "0.8448878758");
  CHECK(format_sig(1.0 / 3.0) == "0.333333333333");
  CHECK(format_sig(123456789.0) == "123456789");
}
