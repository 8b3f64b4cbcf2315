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
#include <functional>
#include <optional>
#include <string>

#include "pdomd/geometry.hpp"
#include "pdomd/params.hpp"
#include "pdomd/problem.hpp"
#include "pdomd/record.hpp"

namespace pdomd {

// Inequality multipliers Q >= 0 and equality multipliers H.
struct DualState {
  Vector Q;
  Vector H;

  double squared_norm() const { return Q.squaredNorm() + H.squaredNorm(); }
};

struct StepOutcome {
  Vector decision;     // mu^t
  Vector prox_center;  // mu^{t-1}, or its mixed version under the simplex variant
  double drift = 0.0;
  double q_norm = 0.0;  // |Q(t+1)|_2
  double h_norm = 0.0;  // |H(t+1)|_2
  // V <grad f, mu^t - c> + alpha D(mu^t, c) + V^2 |grad f|_*^2 / (2 alpha beta),
  // with c the prox center. Nonnegative by strong convexity.
  double lower_bound_margin = 0.0;
};

// V grad f + sum_i Q_i grad g_i + sum_j H_j h_j.
Vector assemble_dual_weighted_gradient(double V, const Observation& previous,
                                       const DualState& duals);

// max{Q + g + <grad g, mu_new - mu_prev>, 0}.
double update_inequality_multiplier(double Q, double value, const Vector& gradient,
                                    const Vector& mu_new, const Vector& mu_prev);

// H + <h, mu_new> - b.
double update_equality_multiplier(double H, const Vector& h, const Vector& mu_new,
                                  double target);

// Primal-dual online mirror descent.
//
// Slot t consumes the slot t-1 observation taken at mu^{t-1}, picks mu^t by a
// prox step around mu^{t-1} (mixed toward uniform first under the simplex
// variant), then updates the multipliers using mu^t and that same observation.
// Slot 0 has no previous observation: mu^0 is the initial point and the
// multipliers stay at zero.
class PrimalDualMirrorDescent {
 public:
  PrimalDualMirrorDescent(BregmanGeometry geometry, DecisionSet set,
                          Vector targets, Index num_inequalities,
                          AlgorithmParams params, Variant variant);

  StepOutcome first_step();
  StepOutcome step(const Observation& previous);

  const Vector& decision() const { return decision_; }
  const DualState& duals() const { return duals_; }
  std::size_t slot() const { return slot_; }
  const AlgorithmParams& params() const { return params_; }
  const BregmanGeometry& geometry() const { return geometry_; }
  const DecisionSet& set() const { return set_; }
  Variant variant() const { return variant_; }

 private:
  BregmanGeometry geometry_;
  DecisionSet set_;
  Vector targets_;
  AlgorithmParams params_;
  Variant variant_;
  DualState duals_;
  Vector decision_;
  std::size_t slot_ = 0;
};

struct RunOptions {
  // When set, realized regret against this point is accumulated on the fly.
  std::optional<Vector> comparator;
  std::string config_hash;
  // Called after every slot with the engine state, the outcome and the
  // observation the next slot will consume. Used by the audit replay.
  std::function<void(const PrimalDualMirrorDescent&, const StepOutcome&,
                     const Observation&)>
      on_slot;
};

// Runs the algorithm for `horizon` slots with geometry_for(variant). The RNG is
// seeded with `seed` and consumed only by problem sampling, so the run is
// deterministic in (problem, horizon, params, seed, variant).
RunRecord run(const Problem& problem, std::size_t horizon,
              const AlgorithmParams& params, std::uint64_t seed, Variant variant,
              const RunOptions& options = {});

// Decision rule for baseline policies: slot index and the previous slot's
// realization (null at slot 0).
using Policy =
    std::function<Vector(std::size_t t, const SlotRealization* previous)>;

// Plays a baseline policy on the same sample path `run` would see for `seed`.
RunRecord run_policy(const Problem& problem, std::size_t horizon,
                     std::uint64_t seed, const Policy& policy,
                     const std::string& name,
                     const std::optional<Vector>& comparator = std::nullopt);

}  // namespace pdomd
