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

#include "pdomd/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "pdomd/engine.hpp"
#include "pdomd/params.hpp"
#include "pdomd/text.hpp"

namespace pdomd {
namespace {

using nlohmann::json;

double positive_part_norm(const Vector& v) { return v.cwiseMax(0.0).norm(); }

double dual_norm_at(const RunRecord& record, Index t) {
  return std::hypot(record.q_norm[t], record.h_norm[t]);
}

std::string header_value(const std::map<std::string, std::string>& fields,
                         const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw IoError("record CSV: missing header field '" + key + "'");
  return it->second;
}

double header_double(const std::map<std::string, std::string>& fields,
                     const std::string& key) {
  const auto v = parse_double(header_value(fields, key));
  if (!v) throw IoError("record CSV: header field '" + key + "' is not a number");
  return *v;
}

long long header_integer(const std::map<std::string, std::string>& fields,
                         const std::string& key) {
  const auto v = parse_integer(header_value(fields, key));
  if (!v || *v < 0) {
    throw IoError("record CSV: header field '" + key + "' is not a count");
  }
  return *v;
}

std::vector<std::pair<std::string, std::string>> header_fields(const RunHeader& h) {
  std::vector<std::pair<std::string, std::string>> out = {
      {"problem_id", h.problem_id},
      {"policy", h.policy},
      {"geometry", h.geometry},
      {"variant", to_string(h.variant)},
      {"V", format_double(h.params.V)},
      {"alpha", format_double(h.params.alpha)},
      {"theta", format_double(h.params.theta)},
      {"horizon", std::to_string(h.params.horizon)},
      {"drift_window", std::to_string(h.params.drift_window)},
      {"seed", std::to_string(h.seed)},
      {"dimension", std::to_string(h.dimension)},
      {"num_inequalities", std::to_string(h.num_inequalities)},
      {"num_equalities", std::to_string(h.num_equalities)},
      {"config_hash", h.config_hash},
      {"wall_time_seconds", format_double(h.wall_time_seconds)},
  };
  if (h.streaming_regret) {
    out.emplace_back("streaming_regret", format_double(*h.streaming_regret));
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  return std::vector<double>(v.begin(), v.end());
}

Matrix matrix_from_json(const json& j, Index rows, Index cols, const char* what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    throw IoError(std::string("record JSON: '") + what + "' has the wrong length");
  }
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw IoError(std::string("record JSON: '") + what + "' has a ragged row");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Vector vector_from_json(const json& j, Index size, const char* what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != size) {
    throw IoError(std::string("record JSON: '") + what + "' has the wrong length");
  }
  Vector v(size);
  for (Index i = 0; i < size; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

MetricsSummary compute_metrics(const RunRecord& record, const Vector& comparator,
                               const Problem& problem) {
  require(comparator.size() == problem.dimension(),
          "compute_metrics: comparator dimension mismatch");
  require(record.header.dimension == problem.dimension() &&
              record.header.num_inequalities == problem.num_inequalities() &&
              record.header.num_equalities == problem.num_equalities(),
          "compute_metrics: record does not match the problem");
  const Index T = static_cast<Index>(record.length());
  const Index L = problem.num_inequalities();
  const Index M = problem.num_equalities();
  MetricsSummary out;
  out.horizon = record.length();
  if (T == 0) return out;

  Rng rng(record.header.seed);
  Vector g_sum = Vector::Zero(L);
  Vector g_clip_sum = Vector::Zero(L);
  for (Index t = 0; t < T; ++t) {
    const auto slot = problem.sample(static_cast<std::size_t>(t), rng);
    const Vector mu = record.decisions.row(t).transpose();
    if (slot->objective(mu) != record.objective[t]) {
      throw ReplayMismatchError("compute_metrics: replayed objective differs at slot " +
                                std::to_string(t));
    }
    out.realized_regret += record.objective[t] - slot->objective(comparator);
    if (L > 0) {
      const Vector g = record.inequality.row(t).transpose();
      g_sum += g;
      g_clip_sum += g.cwiseMax(0.0);
    }
    out.max_dual_norm = std::max(out.max_dual_norm, dual_norm_at(record, t));
  }
  const double inv_T = 1.0 / static_cast<double>(T);
  out.realized_inequality_violation = positive_part_norm(g_sum * inv_T);
  out.realized_inequality_violation_clip_each = (g_clip_sum * inv_T).norm();
  if (M > 0) {
    out.realized_equality_violation =
        (record.equality.colwise().sum().transpose() * inv_T - problem.targets()).norm();
  }
  out.dual_norm_ratio = out.max_dual_norm / std::sqrt(static_cast<double>(T));

  if (problem.has_exact_means()) {
    std::vector<std::shared_ptr<const ConvexFunction>> g_bar;
    for (Index i = 0; i < L; ++i) g_bar.push_back(problem.mean_inequality(i));
    const Matrix h_bar = problem.mean_equality_vectors();
    double regret = 0.0;
    Vector mean_g = Vector::Zero(L);
    Vector mean_g_clip = Vector::Zero(L);
    Vector mean_h = Vector::Zero(M);
    for (Index t = 0; t < T; ++t) {
      const Vector mu = record.decisions.row(t).transpose();
      const auto f_bar = problem.mean_objective(static_cast<std::size_t>(t), 1);
      regret += f_bar->value(mu) - f_bar->value(comparator);
      for (Index i = 0; i < L; ++i) {
        const double v = g_bar[static_cast<std::size_t>(i)]->value(mu);
        mean_g[i] += v;
        mean_g_clip[i] += std::max(v, 0.0);
      }
      if (M > 0) mean_h += h_bar * mu;
    }
    out.expected_regret = regret;
    out.inequality_violation = positive_part_norm(mean_g * inv_T);
    out.inequality_violation_clip_each = (mean_g_clip * inv_T).norm();
    out.equality_violation = M > 0 ? (mean_h * inv_T - problem.targets()).norm() : 0.0;
  }
  return out;
}

MetricSeries metric_series(const RunRecord& record, const Problem& problem) {
  const Index T = static_cast<Index>(record.length());
  const Index M = record.equality.cols();
  MetricSeries out;
  const bool exact = problem.has_exact_means() && M > 0;
  const Matrix h_bar = exact ? problem.mean_equality_vectors() : Matrix();
  double cost = 0.0;
  double excess = 0.0;
  Vector h_sum = Vector::Zero(M);
  Vector realized_sum = Vector::Zero(M);
  for (Index t = 0; t < T; ++t) {
    const double n = static_cast<double>(t + 1);
    cost += record.objective[t];
    excess += record.inequality.row(t).cwiseMax(0.0).sum();
    out.average_cost.push_back(cost / n);
    out.average_excess.push_back(excess / n);
    if (M > 0) {
      realized_sum += record.equality.row(t).transpose();
      const double realized = (realized_sum / n - problem.targets()).norm();
      out.realized_equality_violation.push_back(realized);
      if (exact) {
        h_sum += h_bar * record.decisions.row(t).transpose();
        out.equality_violation.push_back((h_sum / n - problem.targets()).norm());
      } else {
        out.equality_violation.push_back(realized);
      }
    } else {
      out.realized_equality_violation.push_back(0.0);
      out.equality_violation.push_back(0.0);
    }
  }
  return out;
}

double drift_plus_penalty_constant(const ProblemConstants& c,
                                   const BregmanGeometry& geometry) {
  const double beta = geometry.modulus();
  return 4.0 * c.divergence * c.equality_vector * c.equality_vector / beta +
         c.constraint_value * c.constraint_value +
         2.0 * c.divergence * c.constraint_gradient * c.constraint_gradient / beta;
}

DppAuditResult dpp_audit(const RunRecord& record, const Problem& problem,
                         const DppAuditOptions& options) {
  require(record.header.policy == "primal-dual",
          "dpp_audit: only primal-dual runs can be audited");
  require(record.header.dimension == problem.dimension() &&
              record.header.num_inequalities == problem.num_inequalities() &&
              record.header.num_equalities == problem.num_equalities(),
          "dpp_audit: record does not match the problem");
  const BregmanGeometry geometry = geometry_for(record.header.variant);
  if (geometry.name() != record.header.geometry) {
    throw ReplayMismatchError("dpp_audit: record geometry '" + record.header.geometry +
                              "' does not match its variant");
  }
  DppAuditResult out;
  out.worst_residual = -std::numeric_limits<double>::infinity();
  out.constant = drift_plus_penalty_constant(problem.constants(geometry), geometry);
  const std::size_t T = record.length();
  if (T < 2 || options.samples == 0) return out;

  struct Check {
    std::size_t slot;
    Vector comparator;
  };
  Rng sampler(options.seed);
  std::uniform_int_distribution<std::size_t> pick(1, T - 1);
  std::vector<Check> checks;
  for (std::size_t s = 0; s < options.samples; ++s) {
    Check c{pick(sampler), Vector()};
    if (!options.comparator_at_previous) c.comparator = problem.set().sample_uniform(sampler);
    checks.push_back(std::move(c));
  }
  std::stable_sort(checks.begin(), checks.end(),
                   [](const Check& a, const Check& b) { return a.slot < b.slot; });
  const std::size_t last = checks.back().slot;

  const AlgorithmParams& params = record.header.params;
  PrimalDualMirrorDescent engine(geometry, problem.set(), problem.targets(),
                                 problem.num_inequalities(), params,
                                 record.header.variant);
  const Vector& b = problem.targets();
  Rng rng(record.header.seed);
  std::unique_ptr<SlotRealization> previous;
  Observation observation;
  auto next = checks.begin();
  for (std::size_t t = 0; t <= last; ++t) {
    const Vector mu_prev = engine.decision();
    const DualState duals = engine.duals();
    const StepOutcome outcome = t == 0 ? engine.first_step() : engine.step(observation);
    const Index row = static_cast<Index>(t);
    if (outcome.decision != record.decisions.row(row).transpose()) {
      throw ReplayMismatchError("dpp_audit: replayed decision differs at slot " +
                                std::to_string(t));
    }
    const Vector& mu_t = outcome.decision;
    for (; next != checks.end() && next->slot == t; ++next) {
      const Vector& mu = options.comparator_at_previous ? mu_prev : next->comparator;
      const Vector grad_f = previous->objective_gradient(mu_prev);
      const double lhs = params.V * grad_f.dot(mu_t - mu_prev) + record.drift[row] +
                         params.alpha * bregman_divergence(geometry, mu_t, mu_prev);
      double rhs = params.V * (previous->objective(mu) - previous->objective(mu_prev));
      for (Index i = 0; i < duals.Q.size(); ++i) rhs += duals.Q[i] * previous->inequality(i, mu);
      if (duals.H.size() > 0) {
        rhs += duals.H.dot(previous->equality_vectors() * mu - b);
      }
      rhs += params.alpha * (bregman_divergence(geometry, mu, mu_prev) -
                             bregman_divergence(geometry, mu, mu_t));
      rhs += out.constant;
      const double residual = lhs - rhs;
      ++out.checked;
      if (residual > out.worst_residual) {
        out.worst_residual = residual;
        out.worst_slot = t;
      }
    }
    previous = problem.sample(t, rng);
    observation = previous->observe(mu_t);
  }
  return out;
}

std::vector<std::string> record_columns(const RunRecord& record) {
  std::vector<std::string> cols{"t"};
  for (Index k = 0; k < record.header.dimension; ++k) cols.push_back("mu_" + std::to_string(k));
  cols.emplace_back("f_realized");
  for (Index i = 0; i < record.header.num_inequalities; ++i) cols.push_back("g_" + std::to_string(i));
  for (Index j = 0; j < record.header.num_equalities; ++j) cols.push_back("h_" + std::to_string(j));
  cols.emplace_back("q_norm");
  cols.emplace_back("h_norm");
  cols.emplace_back("drift");
  return cols;
}

void write_record_csv(const RunRecord& record, std::ostream& out) {
  for (const auto& [key, value] : header_fields(record.header)) {
    out << "# " << key << ": " << value << '\n';
  }
  const auto cols = record_columns(record);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
  for (Index t = 0; t < static_cast<Index>(record.length()); ++t) {
    out << t;
    for (Index k = 0; k < record.decisions.cols(); ++k) out << ',' << format_double(record.decisions(t, k));
    out << ',' << format_double(record.objective[t]);
    for (Index i = 0; i < record.inequality.cols(); ++i) out << ',' << format_double(record.inequality(t, i));
    for (Index j = 0; j < record.equality.cols(); ++j) out << ',' << format_double(record.equality(t, j));
    out << ',' << format_double(record.q_norm[t]) << ',' << format_double(record.h_norm[t])
        << ',' << format_double(record.drift[t]) << '\n';
  }
}

RunRecord read_record_csv(std::istream& in) {
  std::map<std::string, std::string> fields;
  std::string line;
  bool have_columns = false;
  RunRecord record;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      fields[trim(std::string_view(line).substr(1, colon - 1))] =
          trim(std::string_view(line).substr(colon + 1));
      continue;
    }
    if (!have_columns) {
      RunHeader& h = record.header;
      h.problem_id = header_value(fields, "problem_id");
      h.policy = header_value(fields, "policy");
      h.geometry = header_value(fields, "geometry");
      h.variant = parse_variant(header_value(fields, "variant"));
      h.params.V = header_double(fields, "V");
      h.params.alpha = header_double(fields, "alpha");
      h.params.theta = header_double(fields, "theta");
      h.params.horizon = static_cast<std::size_t>(header_integer(fields, "horizon"));
      h.params.drift_window = static_cast<std::size_t>(header_integer(fields, "drift_window"));
      h.seed = static_cast<std::uint64_t>(std::stoull(header_value(fields, "seed")));
      h.dimension = static_cast<Index>(header_integer(fields, "dimension"));
      h.num_inequalities = static_cast<Index>(header_integer(fields, "num_inequalities"));
      h.num_equalities = static_cast<Index>(header_integer(fields, "num_equalities"));
      h.config_hash = fields.count("config_hash") ? fields["config_hash"] : "";
      h.wall_time_seconds = header_double(fields, "wall_time_seconds");
      if (fields.count("streaming_regret")) {
        h.streaming_regret = header_double(fields, "streaming_regret");
      }
      const auto expected = record_columns(record);
      if (split(line, ',') != expected) {
        throw IoError("record CSV: column row does not match the header counts");
      }
      width = expected.size();
      have_columns = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != width) {
      throw IoError("record CSV: line " + std::to_string(line_number) + " has " +
                    std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(width));
    }
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto v = parse_double(cells[c]);
      if (!v) throw IoError("record CSV: bad number on line " + std::to_string(line_number));
      row.push_back(*v);
    }
    const auto t = parse_integer(cells[0]);
    if (!t || *t != static_cast<long long>(rows.size())) {
      throw IoError("record CSV: slots out of order on line " + std::to_string(line_number));
    }
    rows.push_back(std::move(row));
  }
  if (!have_columns) throw IoError("record CSV: no column row");
  record.resize(rows.size());
  const Index d = record.header.dimension;
  const Index L = record.header.num_inequalities;
  const Index M = record.header.num_equalities;
  for (Index t = 0; t < static_cast<Index>(rows.size()); ++t) {
    const auto& row = rows[static_cast<std::size_t>(t)];
    Index c = 0;
    for (Index k = 0; k < d; ++k) record.decisions(t, k) = row[c++];
    record.objective[t] = row[c++];
    for (Index i = 0; i < L; ++i) record.inequality(t, i) = row[c++];
    for (Index j = 0; j < M; ++j) record.equality(t, j) = row[c++];
    record.q_norm[t] = row[c++];
    record.h_norm[t] = row[c++];
    record.drift[t] = row[c++];
  }
  return record;
}

json record_to_json(const RunRecord& record) {
  const RunHeader& h = record.header;
  json header = {
      {"problem_id", h.problem_id},
      {"policy", h.policy},
      {"geometry", h.geometry},
      {"variant", to_string(h.variant)},
      {"params",
       {{"V", h.params.V},
        {"alpha", h.params.alpha},
        {"theta", h.params.theta},
        {"horizon", h.params.horizon},
        {"drift_window", h.params.drift_window}}},
      {"seed", h.seed},
      {"dimension", h.dimension},
      {"num_inequalities", h.num_inequalities},
      {"num_equalities", h.num_equalities},
      {"config_hash", h.config_hash},
      {"wall_time_seconds", h.wall_time_seconds},
  };
  if (h.streaming_regret) header["streaming_regret"] = *h.streaming_regret;
  return {{"header", header},
          {"decisions", matrix_to_json(record.decisions)},
          {"objective", vector_to_json(record.objective)},
          {"inequality", matrix_to_json(record.inequality)},
          {"equality", matrix_to_json(record.equality)},
          {"q_norm", vector_to_json(record.q_norm)},
          {"h_norm", vector_to_json(record.h_norm)},
          {"drift", vector_to_json(record.drift)}};
}

RunRecord record_from_json(const json& j) {
  try {
    RunRecord record;
    const json& h = j.at("header");
    record.header.problem_id = h.at("problem_id").get<std::string>();
    record.header.policy = h.at("policy").get<std::string>();
    record.header.geometry = h.at("geometry").get<std::string>();
    record.header.variant = parse_variant(h.at("variant").get<std::string>());
    const json& p = h.at("params");
    record.header.params.V = p.at("V").get<double>();
    record.header.params.alpha = p.at("alpha").get<double>();
    record.header.params.theta = p.at("theta").get<double>();
    record.header.params.horizon = p.at("horizon").get<std::size_t>();
    record.header.params.drift_window = p.at("drift_window").get<std::size_t>();
    record.header.seed = h.at("seed").get<std::uint64_t>();
    record.header.dimension = h.at("dimension").get<Index>();
    record.header.num_inequalities = h.at("num_inequalities").get<Index>();
    record.header.num_equalities = h.at("num_equalities").get<Index>();
    record.header.config_hash = h.value("config_hash", "");
    record.header.wall_time_seconds = h.value("wall_time_seconds", 0.0);
    if (h.contains("streaming_regret")) {
      record.header.streaming_regret = h.at("streaming_regret").get<double>();
    }
    const Index T = static_cast<Index>(j.at("objective").size());
    record.resize(static_cast<std::size_t>(T));
    record.decisions = matrix_from_json(j.at("decisions"), T, record.header.dimension, "decisions");
    record.objective = vector_from_json(j.at("objective"), T, "objective");
    record.inequality = matrix_from_json(j.at("inequality"), T, record.header.num_inequalities, "inequality");
    record.equality = matrix_from_json(j.at("equality"), T, record.header.num_equalities, "equality");
    record.q_norm = vector_from_json(j.at("q_norm"), T, "q_norm");
    record.h_norm = vector_from_json(j.at("h_norm"), T, "h_norm");
    record.drift = vector_from_json(j.at("drift"), T, "drift");
    return record;
  } catch (const json::exception& e) {
    throw IoError(std::string("record JSON: ") + e.what());
  }
}

void export_record(const RunRecord& record, ExportFormat format,
                   const std::filesystem::path& path, const json& config) {
  std::ostringstream out;
  if (format == ExportFormat::kCsv) {
    write_record_csv(record, out);
  } else {
    json j = record_to_json(record);
    if (!config.is_null()) j["config"] = config;
    out << j.dump(1) << '\n';
  }
  write_text(path, out.str());
}

RunRecord import_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  if (path.extension() == ".json") {
    try {
      return record_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
      throw IoError("'" + path.string() + "': " + e.what());
    }
  }
  return read_record_csv(in);
}

json summary_to_json(const MetricsSummary& s) {
  const auto opt = [](const std::optional<double>& v) -> json {
    return v ? json(*v) : json(nullptr);
  };
  return {{"horizon", s.horizon},
          {"realized_regret", s.realized_regret},
          {"realized_inequality_violation", s.realized_inequality_violation},
          {"realized_inequality_violation_clip_each",
           s.realized_inequality_violation_clip_each},
          {"realized_equality_violation", s.realized_equality_violation},
          {"expected_available", s.expected_available()},
          {"expected_regret", opt(s.expected_regret)},
          {"inequality_violation", opt(s.inequality_violation)},
          {"inequality_violation_clip_each", opt(s.inequality_violation_clip_each)},
          {"equality_violation", opt(s.equality_violation)},
          {"max_dual_norm", s.max_dual_norm},
          {"dual_norm_ratio", s.dual_norm_ratio}};
}

void write_summary_csv(std::span<const MetricsSummary> summaries, std::ostream& out) {
  out << "horizon,realized_regret,expected_regret,inequality_violation,"
         "inequality_violation_clip_each,equality_violation,"
         "realized_inequality_violation,realized_inequality_violation_clip_each,"
         "realized_equality_violation,max_dual_norm,dual_norm_ratio\n";
  for (const MetricsSummary& s : summaries) {
    out << s.horizon << ',' << format_double(s.realized_regret) << ','
        << optional_field(s.expected_regret) << ',' << optional_field(s.inequality_violation)
        << ',' << optional_field(s.inequality_violation_clip_each) << ','
        << optional_field(s.equality_violation) << ','
        << format_double(s.realized_inequality_violation) << ','
        << format_double(s.realized_inequality_violation_clip_each) << ','
        << format_double(s.realized_equality_violation) << ','
        << format_double(s.max_dual_norm) << ',' << format_double(s.dual_norm_ratio) << '\n';
  }
}

void export_summary(const MetricsSummary& summary, ExportFormat format,
                    const std::filesystem::path& path) {
  std::ostringstream out;
  if (format == ExportFormat::kCsv) {
    write_summary_csv(std::span<const MetricsSummary>(&summary, 1), out);
  } else {
    out << summary_to_json(summary).dump(1) << '\n';
  }
  write_text(path, out.str());
}

MeanError mean_and_standard_error(std::span<const double> values) {
  MeanError out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.standard_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

AggregateMetrics aggregate_metrics(std::span<const MetricsSummary> summaries) {
  AggregateMetrics out;
  out.runs = summaries.size();
  const auto collect = [&](auto field) {
    std::vector<double> v;
    for (const auto& s : summaries) v.push_back(field(s));
    return mean_and_standard_error(v);
  };
  const auto collect_optional = [&](auto field) -> std::optional<MeanError> {
    std::vector<double> v;
    for (const auto& s : summaries) {
      const std::optional<double> x = field(s);
      if (!x) return std::nullopt;
      v.push_back(*x);
    }
    if (v.empty()) return std::nullopt;
    return mean_and_standard_error(v);
  };
  out.realized_regret = collect([](const MetricsSummary& s) { return s.realized_regret; });
  out.realized_inequality_violation =
      collect([](const MetricsSummary& s) { return s.realized_inequality_violation; });
  out.realized_equality_violation =
      collect([](const MetricsSummary& s) { return s.realized_equality_violation; });
  out.expected_regret = collect_optional([](const MetricsSummary& s) { return s.expected_regret; });
  out.inequality_violation =
      collect_optional([](const MetricsSummary& s) { return s.inequality_violation; });
  out.inequality_violation_clip_each = collect_optional(
      [](const MetricsSummary& s) { return s.inequality_violation_clip_each; });
  out.equality_violation =
      collect_optional([](const MetricsSummary& s) { return s.equality_violation; });
  out.max_dual_norm = collect([](const MetricsSummary& s) { return s.max_dual_norm; });
  out.dual_norm_ratio = collect([](const MetricsSummary& s) { return s.dual_norm_ratio; });
  return out;
}

json aggregate_to_json(const AggregateMetrics& a) {
  const auto pair = [](const MeanError& m) -> json {
    return {{"mean", m.mean}, {"standard_error", m.standard_error}};
  };
  const auto opt = [&](const std::optional<MeanError>& m) -> json {
    return m ? pair(*m) : json(nullptr);
  };
  return {{"runs", a.runs},
          {"realized_regret", pair(a.realized_regret)},
          {"realized_inequality_violation", pair(a.realized_inequality_violation)},
          {"realized_equality_violation", pair(a.realized_equality_violation)},
          {"expected_regret", opt(a.expected_regret)},
          {"inequality_violation", opt(a.inequality_violation)},
          {"inequality_violation_clip_each", opt(a.inequality_violation_clip_each)},
          {"equality_violation", opt(a.equality_violation)},
          {"max_dual_norm", pair(a.max_dual_norm)},
          {"dual_norm_ratio", pair(a.dual_norm_ratio)}};
}

}  // namespace pdomd
