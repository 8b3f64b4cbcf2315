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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "pdomd/problem.hpp"
#include "pdomd/record.hpp"

namespace pdomd {

class IoError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class ReplayMismatchError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

struct MetricsSummary {
  std::size_t horizon = 0;
  // Sum_t f^t(mu^t) - f^t(mu*) over the realized slots.
  double realized_regret = 0.0;
  // Realized constraint violations from the recorded values.
  double realized_inequality_violation = 0.0;            // |[avg g]_+|
  double realized_inequality_violation_clip_each = 0.0;  // |avg [g]_+|
  double realized_equality_violation = 0.0;              // |avg <h, mu> - b|

  // Expected-form metrics, present when the problem has exact means.
  std::optional<double> expected_regret;
  std::optional<double> inequality_violation;  // clip after averaging
  std::optional<double> inequality_violation_clip_each;
  std::optional<double> equality_violation;

  double max_dual_norm = 0.0;
  double dual_norm_ratio = 0.0;  // max_dual_norm / sqrt(T)

  bool expected_available() const { return expected_regret.has_value(); }
};

// Replays the realizations from the record's seed to evaluate f^t at the
// comparator.
MetricsSummary compute_metrics(const RunRecord& record, const Vector& comparator,
                               const Problem& problem);

// Running-average series over t = 1..T.
struct MetricSeries {
  std::vector<double> average_cost;  // (1/t) sum f^s(mu^s)
  std::vector<double> average_excess;  // (1/t) sum_s sum_i [g_i^s(mu^s)]_+
  // |(1/t) sum E[h] mu^s - b|, or the realized form without exact means
  std::vector<double> equality_violation;
  std::vector<double> realized_equality_violation;
};

MetricSeries metric_series(const RunRecord& record, const Problem& problem);

struct DppAuditOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  // Compare against mu^{t-1} instead of a uniform draw from the set.
  bool comparator_at_previous = false;
};

struct DppAuditResult {
  double worst_residual = 0.0;  // LHS - RHS, nonpositive when the bound holds
  std::size_t worst_slot = 0;
  std::size_t checked = 0;
  double constant = 0.0;  // the additive constant of the bound
};

// Replays the run and checks the drift-plus-penalty bound at sampled
// (slot, comparator) pairs, using the drift stored in the record.
DppAuditResult dpp_audit(const RunRecord& record, const Problem& problem,
                         const DppAuditOptions& options = {});

double drift_plus_penalty_constant(const ProblemConstants& constants,
                                   const BregmanGeometry& geometry);

// CSV: '#' comment lines carry the header, then the column row
// t,mu_0..,f_realized,g_..,h_..,q_norm,h_norm,drift and one row per slot.
std::vector<std::string> record_columns(const RunRecord& record);
void write_record_csv(const RunRecord& record, std::ostream& out);
RunRecord read_record_csv(std::istream& in);

nlohmann::json record_to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& json);

enum class ExportFormat { kCsv, kJson };

// JSON exports may carry an extra "config" object for replay.
void export_record(const RunRecord& record, ExportFormat format,
                   const std::filesystem::path& path,
                   const nlohmann::json& config = nullptr);
RunRecord import_record(const std::filesystem::path& path);

nlohmann::json summary_to_json(const MetricsSummary& summary);
void write_summary_csv(std::span<const MetricsSummary> summaries,
                       std::ostream& out);
void export_summary(const MetricsSummary& summary, ExportFormat format,
                    const std::filesystem::path& path);

struct MeanError {
  double mean = 0.0;
  double standard_error = 0.0;
};

MeanError mean_and_standard_error(std::span<const double> values);

struct AggregateMetrics {
  std::size_t runs = 0;
  MeanError realized_regret;
  MeanError realized_inequality_violation;
  MeanError realized_equality_violation;
  std::optional<MeanError> expected_regret;
  std::optional<MeanError> inequality_violation;
  std::optional<MeanError> inequality_violation_clip_each;
  std::optional<MeanError> equality_violation;
  MeanError max_dual_norm;
  MeanError dual_norm_ratio;
};

AggregateMetrics aggregate_metrics(std::span<const MetricsSummary> summaries);
nlohmann::json aggregate_to_json(const AggregateMetrics& aggregate);

}  // namespace pdomd
