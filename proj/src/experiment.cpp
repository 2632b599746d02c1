#include "freshcache/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "freshcache/parallel.hpp"

#include "json.hpp"

namespace fresh {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kKnownPolicies = {"whittle", "popular",
                                                 "alwaysfetch"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad number for '" + key + "': " + v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean for '" + key + "': " + v);
}

}  // namespace

std::string format_sig(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

void ExperimentConfig::validate() const {
  if (n_contents < 2) throw std::invalid_argument("config: n_contents < 2");
  if (zipf_alpha < 0) throw std::invalid_argument("config: zipf_alpha < 0");
  if (lambdas.empty() || cache_sizes.empty() || fetch_costs.empty())
    throw std::invalid_argument("config: empty sweep axis");
  for (double l : lambdas)
    if (!(l >= 0)) throw std::invalid_argument("config: lambda < 0");
  for (int m : cache_sizes)
    if (m < 1 || m >= n_contents)
      throw std::invalid_argument("config: cache size must satisfy 1 <= M < N");
  for (double f : fetch_costs)
    if (!(f > 0)) throw std::invalid_argument("config: fetch_cost <= 0");
  if (!(ageing_cost > 0)) throw std::invalid_argument("config: ageing_cost <= 0");
  if (!(request_rate > 0)) throw std::invalid_argument("config: request_rate <= 0");
  if (policies.empty()) throw std::invalid_argument("config: no policies");
  for (const auto& p : policies)
    if (std::find(kKnownPolicies.begin(), kKnownPolicies.end(), p) ==
        kKnownPolicies.end())
      throw std::invalid_argument("config: unknown policy '" + p + "'");
  if (!(horizon > 0)) throw std::invalid_argument("config: horizon <= 0");
  if (effective_warmup() >= horizon)
    throw std::invalid_argument("config: warmup >= horizon");
  if (replications < 2) throw std::invalid_argument("config: replications < 2");
}

std::vector<std::string> preset_names() {
  return {"fig3", "fig4a", "fig4b", "fig6"};
}

ExperimentConfig preset_config(const std::string& name,
                               const std::string& scale) {
  ExperimentConfig cfg;
  cfg.preset = name;
  cfg.scale = scale.empty() ? "desk" : scale;
  cfg.zipf_alpha = 1.0;
  cfg.ageing_cost = 0.1;
  cfg.request_rate = 5.0;
  cfg.lower_bound = false;
  cfg.policies = {"whittle"};

  if (name == "fig3") {
    cfg.lambdas = {0.01};
    cfg.fetch_costs = {1.0};
    cfg.policies = {"whittle", "popular"};
    cfg.lower_bound = true;
  } else if (name == "fig4a") {
    cfg.lambdas = {0.01, 2.0, 5.0};
    cfg.fetch_costs = {5.0};
  } else if (name == "fig4b") {
    cfg.lambdas = {2.0};
    cfg.fetch_costs = {5.0};
  } else if (name == "fig6") {
    cfg.lambdas = {2.0};
    cfg.fetch_costs = {1.0, 2.0, 5.0};
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }

  if (cfg.scale == "desk") {
    cfg.n_contents = 100;
    cfg.cache_sizes = {4, 6, 8, 10};
    cfg.horizon = 20000.0;
    cfg.replications = 10;
  } else if (cfg.scale == "paper") {
    cfg.n_contents = 1000;
    cfg.cache_sizes = {40, 50, 60, 70, 80, 90, 100};
    cfg.horizon = 50000.0;
    cfg.replications = 5;
  } else {
    throw std::invalid_argument("unknown scale '" + cfg.scale +
                                "' (use desk or paper)");
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.preset = "custom";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty())
      throw std::invalid_argument("config: empty value for '" + key + "'");

    if (key == "n_contents") {
      cfg.n_contents = static_cast<int>(to_double(key, val));
    } else if (key == "zipf_alpha") {
      cfg.zipf_alpha = to_double(key, val);
    } else if (key == "lambda" || key == "lambdas") {
      cfg.lambdas.clear();
      for (const auto& v : split_list(val))
        cfg.lambdas.push_back(to_double(key, v));
    } else if (key == "cache_sizes" || key == "cache_size") {
      cfg.cache_sizes.clear();
      for (const auto& v : split_list(val))
        cfg.cache_sizes.push_back(static_cast<int>(to_double(key, v)));
    } else if (key == "fetch_cost" || key == "fetch_costs") {
      cfg.fetch_costs.clear();
      for (const auto& v : split_list(val))
        cfg.fetch_costs.push_back(to_double(key, v));
    } else if (key == "ageing_cost") {
      cfg.ageing_cost = to_double(key, val);
    } else if (key == "request_rate") {
      cfg.request_rate = to_double(key, val);
    } else if (key == "policies" || key == "policy") {
      cfg.policies = split_list(val);
    } else if (key == "horizon") {
      cfg.horizon = to_double(key, val);
    } else if (key == "warmup") {
      cfg.warmup = to_double(key, val);
    } else if (key == "replications") {
      cfg.replications = static_cast<int>(to_double(key, val));
    } else if (key == "seed") {
      cfg.seed = std::stoull(val);
    } else if (key == "lower_bound") {
      cfg.lower_bound = to_bool(key, val);
    } else if (key == "random_init") {
      cfg.random_init = to_bool(key, val);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

std::string canonical_text(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "n_contents=" << c.n_contents << ";zipf_alpha=" << format_sig(c.zipf_alpha)
      << ";lambdas=";
  for (double l : c.lambdas) out << format_sig(l) << ",";
  out << ";cache_sizes=";
  for (int m : c.cache_sizes) out << m << ",";
  out << ";fetch_costs=";
  for (double f : c.fetch_costs) out << format_sig(f) << ",";
  out << ";ageing_cost=" << format_sig(c.ageing_cost)
      << ";request_rate=" << format_sig(c.request_rate) << ";policies=";
  for (const auto& p : c.policies) out << p << ",";
  out << ";horizon=" << format_sig(c.horizon)
      << ";warmup=" << format_sig(c.effective_warmup())
      << ";replications=" << c.replications << ";seed=" << c.seed
      << ";lower_bound=" << c.lower_bound << ";random_init=" << c.random_init
      << ";preset=" << c.preset << ";scale=" << c.scale;
  return out.str();
}

}  // namespace

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = canonical_text(cfg);
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Catalog catalog_for(const ExperimentConfig& cfg, int cache_size,
                    double lambda) {
  return build_catalog(cfg.n_contents, cfg.zipf_alpha, lambda, cache_size);
}

CostModel cost_for(const ExperimentConfig& cfg, double fetch_cost) {
  return CostModel{fetch_cost, cfg.ageing_cost, cfg.request_rate};
}

std::unique_ptr<Policy> make_policy(const std::string& name,
                                    const Catalog& catalog,
                                    const CostModel& cost) {
  if (name == "whittle") return make_whittle_policy(catalog, cost);
  if (name == "popular") return make_popular_baseline(catalog, cost);
  if (name == "alwaysfetch") return make_always_fetch_policy();
  throw std::invalid_argument("unknown policy '" + name + "'");
}

namespace {

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  for (int m : cfg.cache_sizes)
    for (double l : cfg.lambdas)
      for (double f : cfg.fetch_costs) points.push_back({m, l, f});
  return points;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ExperimentReport run_sweep(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  const auto points = sweep_points(cfg);
  const int n_points = static_cast<int>(points.size());
  const int n_policies = static_cast<int>(cfg.policies.size());

  std::vector<double> lbs(n_points, kNan), chs(n_points, kNan);
  if (cfg.lower_bound) {
    parallel_for(n_points, jobs, [&](int i) {
      const Catalog cat = catalog_for(cfg, points[i].cache_size, points[i].lambda);
      const DualResult d = dual_lower_bound(cat, cost_for(cfg, points[i].fetch_cost));
      lbs[i] = d.lower_bound;
      chs[i] = d.ch_opt;
    });
  }

  // One task per (point, policy); replications use common random numbers
  // derived from the config seed, shared across points and policies.
  std::vector<ReplicateSummary> summaries(n_points * n_policies);
  parallel_for(n_points * n_policies, jobs, [&](int task) {
    const int pi = task / n_policies;
    const int qi = task % n_policies;
    const Catalog cat = catalog_for(cfg, points[pi].cache_size, points[pi].lambda);
    const CostModel cost = cost_for(cfg, points[pi].fetch_cost);
    const auto policy = make_policy(cfg.policies[qi], cat, cost);
    summaries[task] =
        replicate(cat, cost, *policy, cfg.horizon, cfg.effective_warmup(),
                  cfg.replications, cfg.seed, 1, SimOptions{cfg.random_init});
  });

  ExperimentReport report;
  report.config = cfg;
  report.hash = config_hash(cfg);
  report.timestamp = utc_timestamp();
  report.rows.reserve(summaries.size());
  for (int pi = 0; pi < n_points; ++pi) {
    std::vector<std::string> sorted_policies = cfg.policies;
    std::sort(sorted_policies.begin(), sorted_policies.end());
    for (const auto& name : sorted_policies) {
      const int qi = static_cast<int>(
          std::find(cfg.policies.begin(), cfg.policies.end(), name) -
          cfg.policies.begin());
      SweepRow row;
      row.policy = name;
      row.point = points[pi];
      row.stats = summaries[pi * n_policies + qi];
      row.lower_bound = lbs[pi];
      row.ch_opt = chs[pi];
      row.seed = cfg.seed;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::vector<LbRow> run_lb(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<LbRow> rows;
  for (const auto& pt : sweep_points(cfg)) {
    const Catalog cat = catalog_for(cfg, pt.cache_size, pt.lambda);
    const DualResult d = dual_lower_bound(cat, cost_for(cfg, pt.fetch_cost));
    rows.push_back({pt, d.lower_bound, d.ch_opt});
  }
  return rows;
}

namespace {

void csv_number(std::ostream& out, double v) {
  if (std::isnan(v))
    out << "";
  else
    out << format_sig(v);
}

}  // namespace

void write_sweep_csv(std::ostream& out, const ExperimentReport& report) {
  const auto& cfg = report.config;
  out << "policy,cache_size,lambda,fetch_cost,ageing_cost,request_rate,"
         "n_contents,horizon,warmup,replications,seed,"
         "avg_cost_mean,avg_cost_std,avg_cost_ci95,"
         "fetch_rate_mean,fetch_rate_ci95,ageing_rate_mean,ageing_rate_ci95,"
         "hit_rate_mean,hit_rate_ci95,fetch_on_hit_mean,fetch_on_hit_ci95,"
         "lower_bound,ch_opt,config_hash\n";
  for (const auto& r : report.rows) {
    out << r.policy << ',' << r.point.cache_size << ','
        << format_sig(r.point.lambda) << ',' << format_sig(r.point.fetch_cost)
        << ',' << format_sig(cfg.ageing_cost) << ','
        << format_sig(cfg.request_rate) << ',' << cfg.n_contents << ','
        << format_sig(cfg.horizon) << ',' << format_sig(cfg.effective_warmup())
        << ',' << r.stats.replications << ',' << r.seed << ','
        << format_sig(r.stats.avg_cost_rate.mean) << ','
        << format_sig(r.stats.avg_cost_rate.stddev) << ','
        << format_sig(r.stats.avg_cost_rate.ci95) << ','
        << format_sig(r.stats.fetch_cost_rate.mean) << ','
        << format_sig(r.stats.fetch_cost_rate.ci95) << ','
        << format_sig(r.stats.ageing_cost_rate.mean) << ','
        << format_sig(r.stats.ageing_cost_rate.ci95) << ','
        << format_sig(r.stats.hit_rate.mean) << ','
        << format_sig(r.stats.hit_rate.ci95) << ','
        << format_sig(r.stats.fetch_on_hit_rate.mean) << ','
        << format_sig(r.stats.fetch_on_hit_rate.ci95) << ',';
    csv_number(out, r.lower_bound);
    out << ',';
    csv_number(out, r.ch_opt);
    out << ',' << report.hash << '\n';
  }
}

void write_lb_csv(std::ostream& out, const ExperimentConfig& cfg,
                  const std::vector<LbRow>& rows) {
  out << "cache_size,lambda,fetch_cost,ageing_cost,request_rate,n_contents,"
         "lower_bound,ch_opt\n";
  for (const auto& r : rows) {
    out << r.point.cache_size << ',' << format_sig(r.point.lambda) << ','
        << format_sig(r.point.fetch_cost) << ',' << format_sig(cfg.ageing_cost)
        << ',' << format_sig(cfg.request_rate) << ',' << cfg.n_contents << ','
        << format_sig(r.lower_bound) << ',' << format_sig(r.ch_opt) << '\n';
  }
}

namespace {

using nlohmann::json;

json stats_to_json(const FieldStats& f) {
  return json{{"mean", f.mean}, {"stddev", f.stddev}, {"ci95", f.ci95}};
}

FieldStats stats_from_json(const json& j) {
  return FieldStats{j.at("mean").get<double>(), j.at("stddev").get<double>(),
                    j.at("ci95").get<double>()};
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"n_contents", c.n_contents},
              {"zipf_alpha", c.zipf_alpha},
              {"lambdas", c.lambdas},
              {"cache_sizes", c.cache_sizes},
              {"fetch_costs", c.fetch_costs},
              {"ageing_cost", c.ageing_cost},
              {"request_rate", c.request_rate},
              {"policies", c.policies},
              {"horizon", c.horizon},
              {"warmup", c.warmup},
              {"replications", c.replications},
              {"seed", c.seed},
              {"lower_bound", c.lower_bound},
              {"random_init", c.random_init},
              {"preset", c.preset},
              {"scale", c.scale}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.n_contents = j.at("n_contents").get<int>();
  c.zipf_alpha = j.at("zipf_alpha").get<double>();
  c.lambdas = j.at("lambdas").get<std::vector<double>>();
  c.cache_sizes = j.at("cache_sizes").get<std::vector<int>>();
  c.fetch_costs = j.at("fetch_costs").get<std::vector<double>>();
  c.ageing_cost = j.at("ageing_cost").get<double>();
  c.request_rate = j.at("request_rate").get<double>();
  c.policies = j.at("policies").get<std::vector<std::string>>();
  c.horizon = j.at("horizon").get<double>();
  c.warmup = j.at("warmup").get<double>();
  c.replications = j.at("replications").get<int>();
  c.seed = j.at("seed").get<uint64_t>();
  c.lower_bound = j.at("lower_bound").get<bool>();
  c.random_init = j.at("random_init").get<bool>();
  c.preset = j.at("preset").get<std::string>();
  c.scale = j.at("scale").get<std::string>();
  return c;
}

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

double from_nullable(const json& j) {
  return j.is_null() ? kNan : j.get<double>();
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back(json{{"policy", r.policy},
                        {"cache_size", r.point.cache_size},
                        {"lambda", r.point.lambda},
                        {"fetch_cost", r.point.fetch_cost},
                        {"seed", r.seed},
                        {"replications", r.stats.replications},
                        {"avg_cost_rate", stats_to_json(r.stats.avg_cost_rate)},
                        {"fetch_cost_rate", stats_to_json(r.stats.fetch_cost_rate)},
                        {"ageing_cost_rate", stats_to_json(r.stats.ageing_cost_rate)},
                        {"hit_rate", stats_to_json(r.stats.hit_rate)},
                        {"fetch_on_hit_rate", stats_to_json(r.stats.fetch_on_hit_rate)},
                        {"lower_bound", nullable(r.lower_bound)},
                        {"ch_opt", nullable(r.ch_opt)}});
  }
  json doc{{"meta",
            json{{"version", kVersion},
                 {"config_hash", report.hash},
                 {"timestamp", report.timestamp}}},
           {"config", config_to_json(report.config)},
           {"rows", rows}};
  return doc.dump(2);
}

ExperimentReport report_from_json(const std::string& text) {
  const json doc = json::parse(text);
  ExperimentReport report;
  report.config = config_from_json(doc.at("config"));
  report.hash = doc.at("meta").at("config_hash").get<std::string>();
  report.timestamp = doc.at("meta").at("timestamp").get<std::string>();
  for (const auto& j : doc.at("rows")) {
    SweepRow r;
    r.policy = j.at("policy").get<std::string>();
    r.point.cache_size = j.at("cache_size").get<int>();
    r.point.lambda = j.at("lambda").get<double>();
    r.point.fetch_cost = j.at("fetch_cost").get<double>();
    r.seed = j.at("seed").get<uint64_t>();
    r.stats.replications = j.at("replications").get<int>();
    r.stats.avg_cost_rate = stats_from_json(j.at("avg_cost_rate"));
    r.stats.fetch_cost_rate = stats_from_json(j.at("fetch_cost_rate"));
    r.stats.ageing_cost_rate = stats_from_json(j.at("ageing_cost_rate"));
    r.stats.hit_rate = stats_from_json(j.at("hit_rate"));
    r.stats.fetch_on_hit_rate = stats_from_json(j.at("fetch_on_hit_rate"));
    r.stats.master_seed = r.seed;
    r.lower_bound = from_nullable(j.at("lower_bound"));
    r.ch_opt = from_nullable(j.at("ch_opt"));
    report.rows.push_back(std::move(r));
  }
  return report;
}

namespace {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> pts;  // (cache_size, value)
  bool dashed = false;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void write_sweep_svg(std::ostream& out, const ExperimentReport& report) {
  const bool decomposition = report.config.preset == "fig4b";
  std::vector<Series> series;
  const auto find_series = [&](const std::string& label) -> Series& {
    for (auto& s : series)
      if (s.label == label) return s;
    series.push_back(Series{label, {}, false});
    return series.back();
  };

  for (const auto& r : report.rows) {
    std::ostringstream key;
    key << r.policy;
    if (report.config.lambdas.size() > 1) key << " l=" << r.point.lambda;
    if (report.config.fetch_costs.size() > 1) key << " cf=" << r.point.fetch_cost;
    if (decomposition) {
      find_series(key.str() + " fetch")
          .pts.push_back({r.point.cache_size, r.stats.fetch_cost_rate.mean});
      find_series(key.str() + " ageing")
          .pts.push_back({r.point.cache_size, r.stats.ageing_cost_rate.mean});
    } else {
      find_series(key.str()).pts.push_back(
          {r.point.cache_size, r.stats.avg_cost_rate.mean});
      if (!std::isnan(r.lower_bound)) {
        auto& lb = find_series("lower bound");
        lb.dashed = true;
        if (lb.pts.empty() || lb.pts.back().first != r.point.cache_size)
          lb.pts.push_back({r.point.cache_size, r.lower_bound});
      }
    }
  }

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.pts) {
      xmin = std::min(xmin, x); xmax = std::max(xmax, x);
      ymin = std::min(ymin, y); ymax = std::max(ymax, y);
    }
  if (series.empty() || xmin >= xmax) { xmin = 0; xmax = 1; }
  if (ymin >= ymax) { ymin = 0; ymax = std::max(1.0, ymax + 1); }
  const double w = 640, h = 420, ml = 70, mr = 20, mt = 20, mb = 50;
  const auto sx = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  const auto sy = [&](double y) {
    return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">cache size M</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (mt + h - mb) / 2 << ")\">"
      << (decomposition ? "cost-rate component" : "average cost rate")
      << "</text>\n";
  out << "<text x=\"" << ml << "\" y=\"" << h - mb + 16
      << "\" font-size=\"11\" text-anchor=\"middle\">" << format_sig(xmin, 6)
      << "</text>\n";
  out << "<text x=\"" << w - mr << "\" y=\"" << h - mb + 16
      << "\" font-size=\"11\" text-anchor=\"middle\">" << format_sig(xmax, 6)
      << "</text>\n";
  out << "<text x=\"" << ml - 6 << "\" y=\"" << h - mb
      << "\" font-size=\"11\" text-anchor=\"end\">" << format_sig(ymin, 6)
      << "</text>\n";
  out << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
      << "\" font-size=\"11\" text-anchor=\"end\">" << format_sig(ymax, 6)
      << "</text>\n";

  int ci = 0;
  double ly = mt + 10;
  for (auto& s : series) {
    std::sort(s.pts.begin(), s.pts.end());
    const char* color = kPalette[ci++ % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << " points=\"";
    for (const auto& [x, y] : s.pts) out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : s.pts)
      out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << w - mr - 150 << "\" y=\"" << ly
        << "\" font-size=\"12\" fill=\"" << color << "\">" << s.label
        << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
}

}  // namespace fresh
