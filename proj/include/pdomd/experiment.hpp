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


#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pdomd/datacenter.hpp"
#include "pdomd/oracle.hpp"
#include "pdomd/params.hpp"
#include "pdomd/price_trace.hpp"
#include "pdomd/problem.hpp"
#include "pdomd/synthetic.hpp"
#include "pdomd/telemetry.hpp"

namespace pdomd {

enum class Scenario { kSynthetic, kDatacenter };

std::string to_string(Scenario scenario);

struct SyntheticScenario {
  Index dimension = 10;
  Index inequalities = 2;
  Index equalities = 2;
  std::uint64_t problem_seed = 0;
  SyntheticOptions options;
};

struct DatacenterScenario {
  DatacenterConfig config;
  // CSV trace in "slot,zone,price" form. Generated when empty.
  std::optional<std::filesystem::path> trace_path;
  TraceGeneratorOptions trace;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kSynthetic;
  std::vector<std::size_t> horizons;  // "T": one value, or a list for sweeps
  std::vector<std::uint64_t> seeds;
  Variant variant = Variant::kGeneral;
  std::optional<double> V;
  std::optional<double> alpha;
  std::optional<double> theta;
  SyntheticScenario synthetic;
  DatacenterScenario datacenter;
  std::filesystem::path output_dir = "out";
  // Relative trace paths resolve against this directory.
  std::filesystem::path base_dir;
  std::size_t workers = 0;  // 0: hardware concurrency
  std::size_t bootstrap_resamples = 1000;
  std::uint64_t bootstrap_seed = 0;

  std::size_t horizon() const { return horizons.front(); }
  AlgorithmParams params_for(std::size_t horizon) const;
  void validate() const;
};

// Throws ConfigError naming the offending field path.
ExperimentConfig parse_config(const nlohmann::json& json);
ExperimentConfig parse_config(const std::filesystem::path& path);

// Fully resolved form, defaults included. Keys are sorted, so the dump is
// canonical.
nlohmann::json config_to_json(const ExperimentConfig& config);

// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);
std::uint64_t fnv1a(std::string_view bytes);

std::shared_ptr<const Problem> build_problem(const ExperimentConfig& config,
                                             std::size_t horizon);

struct FigureSeries {
  std::string name;  // file stem
  std::vector<double> algorithm;
  std::vector<double> hindsight;
  std::vector<double> reac;  // empty outside the datacenter scenario
};

struct PolicyResults {
  std::string policy;
  std::vector<RunRecord> records;         // one per seed
  std::vector<MetricsSummary> summaries;
  AggregateMetrics aggregate;
};

struct ExperimentResult {
  std::string config_hash;
  HindsightResult hindsight;
  std::vector<PolicyResults> policies;
  // Running average cost, running average inequality excess and equality
  // violation, averaged over seeds.
  std::vector<FigureSeries> figures;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes config.json, records/, summaries/, aggregate.json and one CSV per
// figure into config.output_dir.
void write_experiment(const ExperimentConfig& config,
                      const ExperimentResult& result);
void write_figure_csv(const FigureSeries& series, std::ostream& out);

struct SlopeFit {
  double slope = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  // Some mean is not strictly positive, so the log-log fit is undefined.
  bool degenerate = false;
};

// Ordinary least squares of log y on log x. Degenerate when any y <= 0.
SlopeFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

struct RatePoint {
  std::size_t horizon = 0;
  MeanError regret;
  MeanError inequality_violation;
  MeanError equality_violation;
  MeanError dual_norm_ratio;  // max_t |(Q, H)| / sqrt(T)
};

struct RateReport {
  std::vector<RatePoint> points;
  SlopeFit regret;
  SlopeFit scaled_inequality;  // T * violation
  SlopeFit scaled_equality;
  std::vector<double> dual_norm_ratio;
  // Expected-form metrics when the problem has exact means, realized otherwise.
  bool expected = true;
};

RateReport sweep_rates(const ExperimentConfig& config);

nlohmann::json rate_report_to_json(const RateReport& report);
void write_rate_report(const ExperimentConfig& config, const RateReport& report);

}  // namespace pdomd
