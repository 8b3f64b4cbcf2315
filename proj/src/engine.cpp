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

#include "pdomd/engine.hpp"

#include <chrono>
#include <cmath>

namespace pdomd {

Vector assemble_dual_weighted_gradient(double V, const Observation& previous,
                                       const DualState& duals) {
  require(previous.objective_gradient.size() > 0,
          "assemble_dual_weighted_gradient: missing observation");
  require(previous.constraint_gradients.rows() == duals.Q.size() &&
              previous.equality_vectors.rows() == duals.H.size(),
          "assemble_dual_weighted_gradient: constraint counts do not match");
  Vector p = V * previous.objective_gradient;
  if (duals.Q.size() > 0) p += previous.constraint_gradients.transpose() * duals.Q;
  if (duals.H.size() > 0) p += previous.equality_vectors.transpose() * duals.H;
  return p;
}

double update_inequality_multiplier(double Q, double value, const Vector& gradient,
                                    const Vector& mu_new, const Vector& mu_prev) {
  return std::max(Q + value + gradient.dot(mu_new - mu_prev), 0.0);
}

double update_equality_multiplier(double H, const Vector& h, const Vector& mu_new,
                                  double target) {
  return H + h.dot(mu_new) - target;
}

PrimalDualMirrorDescent::PrimalDualMirrorDescent(BregmanGeometry geometry,
                                                 DecisionSet set, Vector targets,
                                                 Index num_inequalities,
                                                 AlgorithmParams params,
                                                 Variant variant)
    : geometry_(geometry),
      set_(std::move(set)),
      targets_(std::move(targets)),
      params_(params),
      variant_(variant) {
  params_.validate();
  require(num_inequalities >= 0, "engine: negative constraint count");
  if (variant_ == Variant::kSimplex) {
    require(set_.is_simplex(), "engine: the simplex variant needs a simplex set");
    require(geometry_.kind() == BregmanGeometry::Kind::kNegativeEntropy,
            "engine: the simplex variant uses the negative entropy geometry");
  }
  duals_.Q = Vector::Zero(num_inequalities);
  duals_.H = Vector::Zero(targets_.size());
  decision_ = set_.initial_point();
}

StepOutcome PrimalDualMirrorDescent::first_step() {
  require(slot_ == 0, "engine: first_step called after slot 0");
  ++slot_;
  StepOutcome outcome;
  outcome.decision = decision_;
  outcome.prox_center = decision_;
  return outcome;
}

StepOutcome PrimalDualMirrorDescent::step(const Observation& previous) {
  require(slot_ > 0, "engine: slot 0 must use first_step");
  const Index d = set_.dimension();
  require(previous.objective_gradient.size() == d &&
              previous.constraint_values.size() == duals_.Q.size() &&
              previous.constraint_gradients.rows() == duals_.Q.size() &&
              previous.equality_vectors.rows() == duals_.H.size(),
          "engine: observation does not match the problem dimensions");
  if (duals_.Q.size() > 0) {
    require(previous.constraint_gradients.cols() == d,
            "engine: constraint gradient width mismatch");
  }
  if (duals_.H.size() > 0) {
    require(previous.equality_vectors.cols() == d,
            "engine: equality vector width mismatch");
  }

  const Vector& mu_prev = decision_;
  StepOutcome outcome;
  outcome.prox_center = variant_ == Variant::kSimplex
                            ? mix_toward_uniform(mu_prev, params_.theta)
                            : mu_prev;
  const Vector p =
      assemble_dual_weighted_gradient(params_.V, previous, duals_);
  outcome.decision =
      mirror_step(geometry_, set_, outcome.prox_center, p, params_.alpha);
  const Vector& mu_new = outcome.decision;

  const double before = duals_.squared_norm();
  for (Index i = 0; i < duals_.Q.size(); ++i) {
    duals_.Q[i] = update_inequality_multiplier(
        duals_.Q[i], previous.constraint_values[i],
        previous.constraint_gradients.row(i).transpose(), mu_new, mu_prev);
  }
  for (Index j = 0; j < duals_.H.size(); ++j) {
    duals_.H[j] = update_equality_multiplier(
        duals_.H[j], previous.equality_vectors.row(j).transpose(), mu_new,
        targets_[j]);
  }
  outcome.drift = 0.5 * (duals_.squared_norm() - before);
  outcome.q_norm = duals_.Q.norm();
  outcome.h_norm = duals_.H.norm();

  const double grad_norm = geometry_.dual_norm(previous.objective_gradient);
  outcome.lower_bound_margin =
      params_.V * previous.objective_gradient.dot(mu_new - outcome.prox_center) +
      params_.alpha * bregman_divergence(geometry_, mu_new, outcome.prox_center) +
      params_.V * params_.V * grad_norm * grad_norm /
          (2.0 * params_.alpha * geometry_.modulus());

  decision_ = mu_new;
  ++slot_;
  return outcome;
}

namespace {

RunRecord make_record(const Problem& problem, std::size_t horizon,
                      std::uint64_t seed) {
  RunRecord record;
  record.header.problem_id = problem.id();
  record.header.seed = seed;
  record.header.dimension = problem.dimension();
  record.header.num_inequalities = problem.num_inequalities();
  record.header.num_equalities = problem.num_equalities();
  record.resize(horizon);
  return record;
}

void record_slot(RunRecord& record, std::size_t t, const Vector& mu,
                 const SlotRealization& slot) {
  const Index row = static_cast<Index>(t);
  record.decisions.row(row) = mu.transpose();
  record.objective[row] = slot.objective(mu);
  if (record.inequality.cols() > 0) {
    record.inequality.row(row) = slot.inequalities(mu).transpose();
  }
  if (record.equality.cols() > 0) {
    record.equality.row(row) = (slot.equality_vectors() * mu).transpose();
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

RunRecord run(const Problem& problem, std::size_t horizon,
              const AlgorithmParams& params, std::uint64_t seed, Variant variant,
              const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord record = make_record(problem, horizon, seed);
  const BregmanGeometry geometry = geometry_for(variant);
  record.header.geometry = geometry.name();
  record.header.variant = variant;
  record.header.params = params;
  record.header.config_hash = options.config_hash;
  if (horizon == 0) return record;

  if (options.comparator) {
    require(options.comparator->size() == problem.dimension(),
            "run: comparator dimension mismatch");
  }
  PrimalDualMirrorDescent engine(geometry, problem.set(), problem.targets(),
                                 problem.num_inequalities(), params, variant);
  Rng rng(seed);
  Observation previous;
  double regret = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const StepOutcome outcome =
        t == 0 ? engine.first_step() : engine.step(previous);
    const auto slot = problem.sample(t, rng);
    record_slot(record, t, outcome.decision, *slot);
    const Index row = static_cast<Index>(t);
    record.q_norm[row] = outcome.q_norm;
    record.h_norm[row] = outcome.h_norm;
    record.drift[row] = outcome.drift;
    if (options.comparator) {
      regret += record.objective[row] - slot->objective(*options.comparator);
    }
    previous = slot->observe(outcome.decision);
    if (options.on_slot) options.on_slot(engine, outcome, previous);
  }
  if (options.comparator) record.header.streaming_regret = regret;
  record.header.wall_time_seconds = seconds_since(start);
  return record;
}

RunRecord run_policy(const Problem& problem, std::size_t horizon,
                     std::uint64_t seed, const Policy& policy,
                     const std::string& name,
                     const std::optional<Vector>& comparator) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord record = make_record(problem, horizon, seed);
  record.header.policy = name;
  record.header.params.horizon = std::max<std::size_t>(horizon, 1);
  Rng rng(seed);
  std::unique_ptr<SlotRealization> previous;
  double regret = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const Vector mu = policy(t, previous.get());
    require(problem.set().contains(mu, 1e-9),
            "run_policy: policy '" + name + "' left the decision set");
    auto slot = problem.sample(t, rng);
    record_slot(record, t, mu, *slot);
    const Index row = static_cast<Index>(t);
    record.q_norm[row] = 0.0;
    record.h_norm[row] = 0.0;
    record.drift[row] = 0.0;
    if (comparator) regret += record.objective[row] - slot->objective(*comparator);
    previous = std::move(slot);
  }
  if (comparator) record.header.streaming_regret = regret;
  record.header.wall_time_seconds = seconds_since(start);
  return record;
}

}  // namespace pdomd
