// Copyright 2026 The pdomd Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "pdomd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string_view>

#include "pdomd/engine.hpp"
#include "pdomd/pool.hpp"
#include "pdomd/text.hpp"

namespace pdomd {
namespace {

using nlohmann::json;

// ---- config parsing -------------------------------------------------------

std::string join_path(const std::string& parent, std::string_view key) {
  return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) {
    throw ConfigError("config: '" + (path.empty() ? "<root>" : path) +
                      "' must be an object");
  }
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("config: unknown key '" + join_path(path, key) + "'");
    }
  }
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("config: '" + path + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("config: '" + path + "' must be finite");
  return v;
}

std::uint64_t count_at(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  throw ConfigError("config: '" + path + "' must be a nonnegative integer");
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError("config: '" + path + "' must be a string");
  return j.get<std::string>();
}

std::vector<double> numbers_at(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError("config: '" + path + "' must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

template <class T, class Read>
void read_if(const json& j, const std::string& parent, std::string_view key,
             T& field, Read read) {
  if (const auto it = j.find(std::string(key)); it != j.end()) {
    field = read(*it, join_path(parent, key));
  }
}

std::vector<std::uint64_t> parse_seeds(const json& j, const std::string& path) {
  std::vector<std::uint64_t> out;
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    const auto dots = text.find("..");
    const auto a = dots == std::string::npos ? std::nullopt
                                             : parse_integer(text.substr(0, dots));
    const auto b = dots == std::string::npos ? std::nullopt
                                             : parse_integer(text.substr(dots + 2));
    if (!a || !b || *a < 0 || *b < *a) {
      throw ConfigError("config: '" + path + "' must look like \"a..b\" with a <= b");
    }
    for (long long s = *a; s <= *b; ++s) out.push_back(static_cast<std::uint64_t>(s));
    return out;
  }
  if (!j.is_array()) {
    throw ConfigError("config: '" + path + "' must be an array or \"a..b\"");
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(count_at(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::size_t> parse_horizons(const json& j, const std::string& path) {
  std::vector<std::size_t> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(count_at(j[i], path + "[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(count_at(j, path));
  }
  return out;
}

DecisionSet::Kind parse_set_kind(const json& j, const std::string& path) {
  const std::string s = string_at(j, path);
  if (s == "simplex") return DecisionSet::Kind::kSimplex;
  if (s == "box") return DecisionSet::Kind::kBox;
  throw ConfigError("config: '" + path + "' must be \"simplex\" or \"box\"");
}

void parse_synthetic(const json& j, const std::string& path, SyntheticScenario& out) {
  expect_object(j, path);
  reject_unknown(j, path,
                 {"dimension", "inequalities", "equalities", "problem_seed", "set",
                  "drift_amplitude", "drift_period", "objective_noise",
                  "inequality_noise", "equality_noise", "inequality_slack"});
  const auto as_index = [](const json& v, const std::string& p) {
    return static_cast<Index>(count_at(v, p));
  };
  read_if(j, path, "dimension", out.dimension, as_index);
  read_if(j, path, "inequalities", out.inequalities, as_index);
  read_if(j, path, "equalities", out.equalities, as_index);
  read_if(j, path, "problem_seed", out.problem_seed, count_at);
  read_if(j, path, "set", out.options.set_kind, parse_set_kind);
  read_if(j, path, "drift_amplitude", out.options.drift_amplitude, number_at);
  read_if(j, path, "drift_period", out.options.drift_period,
          [](const json& v, const std::string& p) {
            return static_cast<std::size_t>(count_at(v, p));
          });
  read_if(j, path, "objective_noise", out.options.objective_noise, number_at);
  read_if(j, path, "inequality_noise", out.options.inequality_noise, number_at);
  read_if(j, path, "equality_noise", out.options.equality_noise, number_at);
  read_if(j, path, "inequality_slack", out.options.inequality_slack, number_at);
}

void parse_trace_options(const json& j, const std::string& path,
                         TraceGeneratorOptions& out) {
  expect_object(j, path);
  reject_unknown(j, path,
                 {"seed", "mean", "sigma", "zone_levels", "diurnal_amplitude", "period"});
  read_if(j, path, "seed", out.seed, count_at);
  read_if(j, path, "mean", out.mean, number_at);
  read_if(j, path, "sigma", out.sigma, number_at);
  read_if(j, path, "zone_levels", out.zone_levels, numbers_at);
  read_if(j, path, "diurnal_amplitude", out.diurnal_amplitude, number_at);
  read_if(j, path, "period", out.period, [](const json& v, const std::string& p) {
    return static_cast<std::size_t>(count_at(v, p));
  });
}

void parse_datacenter(const json& j, const std::string& path, DatacenterScenario& out) {
  expect_object(j, path);
  reject_unknown(j, path,
                 {"clusters", "servers_per_cluster", "arrival_mean", "service",
                  "budget_mean", "pacing_groups", "pacing_ratios", "pareto_shape",
                  "reac_window", "trace"});
  DatacenterConfig& c = out.config;
  const auto as_size = [](const json& v, const std::string& p) {
    return static_cast<std::size_t>(count_at(v, p));
  };
  read_if(j, path, "clusters", c.clusters, as_size);
  read_if(j, path, "servers_per_cluster", c.servers_per_cluster, as_size);
  read_if(j, path, "arrival_mean", c.arrival_mean, number_at);
  read_if(j, path, "budget_mean", c.budget_mean, number_at);
  read_if(j, path, "pacing_ratios", c.pacing_ratios, numbers_at);
  read_if(j, path, "pareto_shape", c.pareto_shape, number_at);
  read_if(j, path, "reac_window", c.reac_window, as_size);
  if (const auto it = j.find("service"); it != j.end()) {
    const std::string p = join_path(path, "service");
    expect_object(*it, p);
    reject_unknown(*it, p, {"coefficient", "rate", "max_power"});
    read_if(*it, p, "coefficient", c.service.coefficient, number_at);
    read_if(*it, p, "rate", c.service.rate, number_at);
    read_if(*it, p, "max_power", c.service.max_power, number_at);
  }
  if (const auto it = j.find("pacing_groups"); it != j.end()) {
    const std::string p = join_path(path, "pacing_groups");
    if (!it->is_array()) throw ConfigError("config: '" + p + "' must be an array");
    c.pacing_groups.clear();
    for (std::size_t g = 0; g < it->size(); ++g) {
      const std::string pg = p + "[" + std::to_string(g) + "]";
      const json& group = (*it)[g];
      if (!group.is_array()) throw ConfigError("config: '" + pg + "' must be an array");
      std::vector<std::size_t> members;
      for (std::size_t m = 0; m < group.size(); ++m) {
        members.push_back(count_at(group[m], pg + "[" + std::to_string(m) + "]"));
      }
      c.pacing_groups.push_back(std::move(members));
    }
  }
  if (const auto it = j.find("trace"); it != j.end()) {
    const std::string p = join_path(path, "trace");
    if (it->is_string()) {
      out.trace_path = it->get<std::string>();
    } else {
      parse_trace_options(*it, p, out.trace);
    }
  }
}

// ---- metrics helpers ------------------------------------------------------

double regret_of(const MetricsSummary& s) {
  return s.expected_regret ? *s.expected_regret : s.realized_regret;
}
double inequality_of(const MetricsSummary& s) {
  return s.inequality_violation ? *s.inequality_violation
                                : s.realized_inequality_violation;
}
double equality_of(const MetricsSummary& s) {
  return s.equality_violation ? *s.equality_violation : s.realized_equality_violation;
}

void accumulate(std::vector<double>& sum, const std::vector<double>& x, double w) {
  if (sum.empty()) sum.assign(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) sum[i] += w * x[i];
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json slope_to_json(const SlopeFit& fit) {
  return {{"slope", nullable(fit.slope)},
          {"ci_low", nullable(fit.ci_low)},
          {"ci_high", nullable(fit.ci_high)},
          {"degenerate", fit.degenerate}};
}

json mean_error_json(const MeanError& m) {
  return {{"mean", m.mean}, {"standard_error", m.standard_error}};
}

}  // namespace

std::string to_string(Scenario scenario) {
  return scenario == Scenario::kSynthetic ? "synthetic" : "datacenter";
}

AlgorithmParams ExperimentConfig::params_for(std::size_t horizon) const {
  AlgorithmParams p = parameter_schedule(horizon, variant);
  if (V) p.V = *V;
  if (alpha) p.alpha = *alpha;
  if (theta) p.theta = *theta;
  p.validate();
  return p;
}

void ExperimentConfig::validate() const {
  require(!horizons.empty(), "config: 'T' is required");
  for (std::size_t T : horizons) require(T >= 2, "config: 'T' must be at least 2");
  require(!seeds.empty(), "config: 'seeds' must name at least one seed");
  if (V) require(*V > 0.0, "config: 'V' must be positive");
  if (alpha) require(*alpha > 0.0, "config: 'alpha' must be positive");
  if (theta) require(*theta >= 0.0 && *theta < 1.0, "config: 'theta' must lie in [0, 1)");
  if (scenario == Scenario::kDatacenter) {
    datacenter.config.validate();
    require(variant == Variant::kGeneral,
            "config: the datacenter scenario uses the box, so 'variant' must be general");
  } else {
    require(synthetic.dimension >= 1, "config: 'synthetic.dimension' must be positive");
    require(variant == Variant::kGeneral ||
                synthetic.options.set_kind == DecisionSet::Kind::kSimplex,
            "config: the simplex variant needs 'synthetic.set' = \"simplex\"");
  }
  require(bootstrap_resamples >= 1, "config: 'bootstrap_resamples' must be positive");
}

ExperimentConfig parse_config(const json& j) {
  expect_object(j, "");
  reject_unknown(j, "",
                 {"scenario", "T", "seeds", "variant", "V", "alpha", "theta",
                  "synthetic", "datacenter", "output_dir", "workers",
                  "bootstrap_resamples", "bootstrap_seed"});
  ExperimentConfig c;
  const auto scenario = j.find("scenario");
  if (scenario == j.end()) throw ConfigError("config: 'scenario' is required");
  const std::string name = string_at(*scenario, "scenario");
  if (name == "synthetic") {
    c.scenario = Scenario::kSynthetic;
  } else if (name == "datacenter") {
    c.scenario = Scenario::kDatacenter;
  } else {
    throw ConfigError("config: 'scenario' must be \"synthetic\" or \"datacenter\"");
  }
  const auto horizon = j.find("T");
  if (horizon == j.end()) throw ConfigError("config: 'T' is required");
  c.horizons = parse_horizons(*horizon, "T");

  if (const auto it = j.find("seeds"); it != j.end()) {
    c.seeds = parse_seeds(*it, "seeds");
  } else {
    for (std::uint64_t s = 0; s < 20; ++s) c.seeds.push_back(s);
  }
  if (const auto it = j.find("synthetic"); it != j.end()) {
    parse_synthetic(*it, "synthetic", c.synthetic);
  }
  if (const auto it = j.find("datacenter"); it != j.end()) {
    parse_datacenter(*it, "datacenter", c.datacenter);
  }
  if (const auto it = j.find("variant"); it != j.end()) {
    try {
      c.variant = parse_variant(string_at(*it, "variant"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: 'variant': ") + e.what());
    }
  } else {
    const bool simplex = c.scenario == Scenario::kSynthetic &&
                         c.synthetic.options.set_kind == DecisionSet::Kind::kSimplex;
    c.variant = simplex ? Variant::kSimplex : Variant::kGeneral;
  }
  const auto optional_number = [](const json& v, const std::string& p) {
    return std::optional<double>(number_at(v, p));
  };
  read_if(j, "", "V", c.V, optional_number);
  read_if(j, "", "alpha", c.alpha, optional_number);
  read_if(j, "", "theta", c.theta, optional_number);
  read_if(j, "", "output_dir", c.output_dir, [](const json& v, const std::string& p) {
    return std::filesystem::path(string_at(v, p));
  });
  read_if(j, "", "workers", c.workers, [](const json& v, const std::string& p) {
    return static_cast<std::size_t>(count_at(v, p));
  });
  read_if(j, "", "bootstrap_resamples", c.bootstrap_resamples,
          [](const json& v, const std::string& p) {
            return static_cast<std::size_t>(count_at(v, p));
          });
  read_if(j, "", "bootstrap_seed", c.bootstrap_seed, count_at);
  c.validate();
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  ExperimentConfig c = parse_config(j);
  c.base_dir = path.parent_path();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["scenario"] = to_string(c.scenario);
  j["T"] = c.horizons.size() == 1 ? json(c.horizons.front()) : json(c.horizons);
  j["seeds"] = c.seeds;
  j["variant"] = to_string(c.variant);
  if (c.V) j["V"] = *c.V;
  if (c.alpha) j["alpha"] = *c.alpha;
  if (c.theta) j["theta"] = *c.theta;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  j["bootstrap_seed"] = c.bootstrap_seed;
  if (c.scenario == Scenario::kSynthetic) {
    const SyntheticScenario& s = c.synthetic;
    j["synthetic"] = {
        {"dimension", s.dimension},
        {"inequalities", s.inequalities},
        {"equalities", s.equalities},
        {"problem_seed", s.problem_seed},
        {"set", s.options.set_kind == DecisionSet::Kind::kSimplex ? "simplex" : "box"},
        {"drift_amplitude", s.options.drift_amplitude},
        {"drift_period", s.options.drift_period},
        {"objective_noise", s.options.objective_noise},
        {"inequality_noise", s.options.inequality_noise},
        {"equality_noise", s.options.equality_noise},
        {"inequality_slack", s.options.inequality_slack},
    };
  } else {
    const DatacenterConfig& d = c.datacenter.config;
    json dc = {
        {"clusters", d.clusters},
        {"servers_per_cluster", d.servers_per_cluster},
        {"arrival_mean", d.arrival_mean},
        {"service",
         {{"coefficient", d.service.coefficient},
          {"rate", d.service.rate},
          {"max_power", d.service.max_power}}},
        {"budget_mean", d.budget_mean},
        {"pacing_groups", d.pacing_groups},
        {"pacing_ratios", d.pacing_ratios},
        {"pareto_shape", d.pareto_shape},
        {"reac_window", d.reac_window},
    };
    if (c.datacenter.trace_path) {
      dc["trace"] = c.datacenter.trace_path->generic_string();
    } else {
      const TraceGeneratorOptions& t = c.datacenter.trace;
      dc["trace"] = {{"seed", t.seed},
                     {"mean", t.mean},
                     {"sigma", t.sigma},
                     {"zone_levels", t.zone_levels},
                     {"diurnal_amplitude", t.diurnal_amplitude},
                     {"period", t.period}};
    }
    j["datacenter"] = std::move(dc);
  }
  // output_dir, base_dir and workers do not change results and stay out of
  // the hash.
  return j;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& config) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a(config_to_json(config).dump());
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

std::shared_ptr<const Problem> build_problem(const ExperimentConfig& config,
                                             std::size_t horizon) {
  if (config.scenario == Scenario::kSynthetic) {
    const SyntheticScenario& s = config.synthetic;
    return build_synthetic_problem(s.dimension, s.inequalities, s.equalities,
                                   s.problem_seed, s.options);
  }
  const DatacenterScenario& d = config.datacenter;
  PriceTrace trace;
  if (d.trace_path) {
    const std::filesystem::path path = d.trace_path->is_relative()
                                           ? config.base_dir / *d.trace_path
                                           : *d.trace_path;
    trace = ingest_price_trace(path, d.config.clusters);
  } else {
    TraceGeneratorOptions options = d.trace;
    options.slots = horizon;
    trace = generate_price_trace(options);
  }
  return build_datacenter_problem(d.config, std::move(trace), horizon);
}

// ---- single experiment ----------------------------------------------------

namespace {

struct SeedRuns {
  std::vector<RunRecord> records;  // algorithm, hindsight[, reac]
  std::vector<MetricsSummary> summaries;
  std::vector<MetricSeries> series;
};

std::vector<std::string> figure_names(Scenario scenario) {
  if (scenario == Scenario::kDatacenter) return {"cost", "unserved", "pacing"};
  return {"cost", "excess", "equality"};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t T = config.horizon();
  const auto problem = build_problem(config, T);
  const AlgorithmParams params = config.params_for(T);

  ExperimentResult result;
  result.config_hash = config_hash(config);
  result.hindsight = hindsight_optimum(*problem, 0, T);
  const Vector& mu_star = result.hindsight.mu;

  const auto* datacenter = dynamic_cast<const DatacenterProblem*>(problem.get());
  std::vector<std::string> names = {"algorithm", "hindsight"};
  if (datacenter) names.push_back("reac");

  auto runs = parallel_map(config.seeds.size(), config.workers, [&](std::size_t i) {
    const std::uint64_t seed = config.seeds[i];
    SeedRuns out;
    RunOptions options;
    options.comparator = mu_star;
    options.config_hash = result.config_hash;
    out.records.push_back(run(*problem, T, params, seed, config.variant, options));
    out.records.push_back(run_policy(
        *problem, T, seed, [&](std::size_t, const SlotRealization*) { return mu_star; },
        "hindsight", mu_star));
    if (datacenter) out.records.push_back(run_reac(*datacenter, T, seed, mu_star));
    for (RunRecord& r : out.records) {
      r.header.config_hash = result.config_hash;
      out.summaries.push_back(compute_metrics(r, mu_star, *problem));
      out.series.push_back(metric_series(r, *problem));
    }
    return out;
  });

  const double w = 1.0 / static_cast<double>(runs.size());
  const auto fig = figure_names(config.scenario);
  for (const std::string& name : fig) result.figures.push_back({name, {}, {}, {}});
  for (std::size_t p = 0; p < names.size(); ++p) {
    PolicyResults policy;
    policy.policy = names[p];
    for (SeedRuns& seed_runs : runs) {
      policy.records.push_back(std::move(seed_runs.records[p]));
      policy.summaries.push_back(seed_runs.summaries[p]);
      const MetricSeries& s = seed_runs.series[p];
      const std::vector<double>* columns[] = {&s.average_cost, &s.average_excess,
                                              &s.equality_violation};
      for (std::size_t f = 0; f < fig.size(); ++f) {
        FigureSeries& out = result.figures[f];
        std::vector<double>& target =
            p == 0 ? out.algorithm : (p == 1 ? out.hindsight : out.reac);
        accumulate(target, *columns[f], w);
      }
    }
    policy.aggregate = aggregate_metrics(policy.summaries);
    result.policies.push_back(std::move(policy));
  }
  return result;
}

void write_figure_csv(const FigureSeries& series, std::ostream& out) {
  const bool reac = !series.reac.empty();
  out << "t,algorithm,hindsight" << (reac ? ",reac" : "") << '\n';
  for (std::size_t t = 0; t < series.algorithm.size(); ++t) {
    out << (t + 1) << ',' << format_double(series.algorithm[t]) << ','
        << format_double(series.hindsight[t]);
    if (reac) out << ',' << format_double(series.reac[t]);
    out << '\n';
  }
}

void write_experiment(const ExperimentConfig& config, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path root = config.output_dir;
  fs::create_directories(root / "records");
  fs::create_directories(root / "summaries");
  const json config_json = config_to_json(config);
  write_text(root / "config.json", config_json.dump(2) + "\n");

  json aggregate;
  aggregate["config_hash"] = result.config_hash;
  aggregate["seeds"] = config.seeds;
  aggregate["hindsight"] = {
      {"value", result.hindsight.value},
      {"mu", std::vector<double>(result.hindsight.mu.begin(), result.hindsight.mu.end())},
      {"lambda", std::vector<double>(result.hindsight.multipliers.lambda.begin(),
                                     result.hindsight.multipliers.lambda.end())},
      {"eta", std::vector<double>(result.hindsight.multipliers.eta.begin(),
                                  result.hindsight.multipliers.eta.end())},
      {"kkt_residual", result.hindsight.kkt_residual},
  };
  for (const PolicyResults& p : result.policies) {
    for (std::size_t i = 0; i < p.records.size(); ++i) {
      export_record(p.records[i], ExportFormat::kCsv,
                    root / "records" /
                        (p.policy + "_seed" + std::to_string(config.seeds[i]) + ".csv"),
                    config_json);
    }
    std::ostringstream summary;
    write_summary_csv(p.summaries, summary);
    write_text(root / "summaries" / (p.policy + ".csv"), summary.str());
    aggregate["policies"][p.policy] = aggregate_to_json(p.aggregate);
  }
  write_text(root / "aggregate.json", aggregate.dump(2) + "\n");
  for (const FigureSeries& f : result.figures) {
    std::ostringstream out;
    write_figure_csv(f, out);
    write_text(root / (f.name + ".csv"), out.str());
  }
}

// ---- rate sweep -----------------------------------------------------------

SlopeFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "fit_log_log: size mismatch");
  require(x.size() >= 2, "fit_log_log: need at least two points");
  SlopeFit fit;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  fit.ci_low = fit.ci_high = nan;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      fit.degenerate = true;
      fit.slope = nan;
      return fit;
    }
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  require(sxx > 0.0, "fit_log_log: need at least two distinct x values");
  fit.slope = sxy / sxx;
  return fit;
}

RateReport sweep_rates(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::size_t> horizons = config.horizons;
  std::sort(horizons.begin(), horizons.end());
  horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
  require(horizons.size() >= 2, "sweep: need at least two distinct values of T");

  struct Setup {
    std::shared_ptr<const Problem> problem;
    AlgorithmParams params;
    Vector comparator;
  };
  std::vector<Setup> setups;
  for (std::size_t T : horizons) {
    Setup s;
    s.problem = build_problem(config, T);
    s.params = config.params_for(T);
    s.comparator = hindsight_optimum(*s.problem, 0, T).mu;
    setups.push_back(std::move(s));
  }

  const std::size_t n = config.seeds.size();
  const std::string hash = config_hash(config);
  const auto summaries =
      parallel_map(horizons.size() * n, config.workers, [&](std::size_t job) {
        const Setup& s = setups[job / n];
        RunOptions options;
        options.config_hash = hash;
        const RunRecord r = run(*s.problem, horizons[job / n], s.params,
                                config.seeds[job % n], config.variant, options);
        return compute_metrics(r, s.comparator, *s.problem);
      });

  RateReport report;
  report.expected = summaries.front().expected_available();
  // values[m][h][seed] for metrics regret, inequality, equality, dual ratio.
  std::vector<std::vector<std::vector<double>>> values(
      4, std::vector<std::vector<double>>(horizons.size(), std::vector<double>(n)));
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    for (std::size_t i = 0; i < n; ++i) {
      const MetricsSummary& s = summaries[h * n + i];
      values[0][h][i] = regret_of(s);
      values[1][h][i] = inequality_of(s);
      values[2][h][i] = equality_of(s);
      values[3][h][i] = s.dual_norm_ratio;
    }
    RatePoint p;
    p.horizon = horizons[h];
    p.regret = mean_and_standard_error(values[0][h]);
    p.inequality_violation = mean_and_standard_error(values[1][h]);
    p.equality_violation = mean_and_standard_error(values[2][h]);
    p.dual_norm_ratio = mean_and_standard_error(values[3][h]);
    report.dual_norm_ratio.push_back(p.dual_norm_ratio.mean);
    report.points.push_back(p);
  }

  std::vector<double> x(horizons.begin(), horizons.end());
  // Mean over the chosen seed indices of metric m, scaled by T when asked.
  const auto means = [&](std::size_t m, bool scaled, const std::vector<std::size_t>& pick) {
    std::vector<double> y(horizons.size(), 0.0);
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      for (std::size_t i : pick) y[h] += values[m][h][i];
      y[h] /= static_cast<double>(pick.size());
      if (scaled) y[h] *= x[h];
    }
    return y;
  };
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  SlopeFit* fits[] = {&report.regret, &report.scaled_inequality, &report.scaled_equality};
  for (std::size_t m = 0; m < 3; ++m) *fits[m] = fit_log_log(x, means(m, m > 0, all));

  Rng rng(config.bootstrap_seed);
  std::uniform_int_distribution<std::size_t> pick_seed(0, n - 1);
  std::vector<std::vector<double>> boot(3);
  std::vector<std::size_t> pick(n);
  for (std::size_t r = 0; r < config.bootstrap_resamples; ++r) {
    for (auto& p : pick) p = pick_seed(rng);
    for (std::size_t m = 0; m < 3; ++m) {
      const SlopeFit f = fit_log_log(x, means(m, m > 0, pick));
      if (!f.degenerate) boot[m].push_back(f.slope);
    }
  }
  for (std::size_t m = 0; m < 3; ++m) {
    if (fits[m]->degenerate || boot[m].empty()) continue;
    fits[m]->ci_low = quantile(boot[m], 0.025);
    fits[m]->ci_high = quantile(boot[m], 0.975);
  }
  return report;
}

json rate_report_to_json(const RateReport& report) {
  json j;
  j["expected"] = report.expected;
  j["slopes"] = {{"regret", slope_to_json(report.regret)},
                 {"scaled_inequality_violation", slope_to_json(report.scaled_inequality)},
                 {"scaled_equality_violation", slope_to_json(report.scaled_equality)}};
  j["points"] = json::array();
  for (const RatePoint& p : report.points) {
    j["points"].push_back({{"T", p.horizon},
                           {"regret", mean_error_json(p.regret)},
                           {"inequality_violation", mean_error_json(p.inequality_violation)},
                           {"equality_violation", mean_error_json(p.equality_violation)},
                           {"dual_norm_ratio", mean_error_json(p.dual_norm_ratio)}});
  }
  return j;
}

void write_rate_report(const ExperimentConfig& config, const RateReport& report) {
  std::filesystem::create_directories(config.output_dir);
  write_text(config.output_dir / "config.json", config_to_json(config).dump(2) + "\n");
  write_text(config.output_dir / "rates.json", rate_report_to_json(report).dump(2) + "\n");
  std::ostringstream csv;
  csv << "T,regret,regret_se,inequality_violation,inequality_violation_se,"
         "equality_violation,equality_violation_se,dual_norm_ratio\n";
  for (const RatePoint& p : report.points) {
    csv << p.horizon << ',' << format_double(p.regret.mean) << ','
        << format_double(p.regret.standard_error) << ','
        << format_double(p.inequality_violation.mean) << ','
        << format_double(p.inequality_violation.standard_error) << ','
        << format_double(p.equality_violation.mean) << ','
        << format_double(p.equality_violation.standard_error) << ','
        << format_double(p.dual_norm_ratio.mean) << '\n';
  }
  write_text(config.output_dir / "rates.csv", csv.str());
}

}  // namespace pdomd
