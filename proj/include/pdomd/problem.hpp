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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdomd/geometry.hpp"
#include "pdomd/types.hpp"

namespace pdomd {

// Affine representation <coefficients, mu> + offset.
struct AffineForm {
  Vector coefficients;
  double offset = 0.0;
};

// A convex function on the decision set with a chosen subgradient.
class ConvexFunction {
 public:
  virtual ~ConvexFunction() = default;
  virtual double value(const Vector& mu) const = 0;
  virtual Vector gradient(const Vector& mu) const = 0;
  // Returns the affine form when the function is affine; solvers use it for
  // exact vertex/clip evaluation.
  virtual std::optional<AffineForm> affine() const { return std::nullopt; }
};

class AffineFunction final : public ConvexFunction {
 public:
  AffineFunction(Vector coefficients, double offset)
      : form_{std::move(coefficients), offset} {}
  double value(const Vector& mu) const override {
    return form_.coefficients.dot(mu) + form_.offset;
  }
  Vector gradient(const Vector&) const override { return form_.coefficients; }
  std::optional<AffineForm> affine() const override { return form_; }

 private:
  AffineForm form_;
};

// Values and subgradients of one slot's functions at one point; this is all the
// engine ever sees.
struct Observation {
  double objective_value = 0.0;
  Vector objective_gradient;
  Vector constraint_values;   // g_i(mu), length L
  Matrix constraint_gradients;  // L x d
  Matrix equality_vectors;      // h_j, M x d
};

// One slot's sampled functions f^t, g_i^t and vectors h_j^t. Can be evaluated
// at any point of the decision set.
class SlotRealization {
 public:
  virtual ~SlotRealization() = default;
  virtual Index num_inequalities() const = 0;
  virtual double objective(const Vector& mu) const = 0;
  virtual Vector objective_gradient(const Vector& mu) const = 0;
  virtual double inequality(Index i, const Vector& mu) const = 0;
  virtual Vector inequality_gradient(Index i, const Vector& mu) const = 0;
  virtual const Matrix& equality_vectors() const = 0;

  Vector inequalities(const Vector& mu) const;
  Observation observe(const Vector& mu) const;
};

// Bounds used by the diagnostic inequalities (drift-plus-penalty audit and
// friends). Dual norms follow the geometry they were computed for.
struct ProblemConstants {
  double objective_gradient = 0.0;   // D1: sup |grad f|_*
  double constraint_gradient = 0.0;  // D2: sup sqrt(sum_i |grad g_i|_*^2)
  double constraint_value = 0.0;     // G:  sup sqrt(sum_i g_i^2)
  double equality_vector = 0.0;      // H:  sup sqrt(sum_j |h_j|_*^2)
  double objective_value = 0.0;      // F:  sup |f|
  double divergence = 0.0;           // R:  sup D(x, y) over the set
};

// A static convex program min f(mu) s.t. g(mu) <= 0, A mu = b, mu in set.
struct StaticProgram {
  DecisionSet set;
  std::shared_ptr<const ConvexFunction> objective;
  std::vector<std::shared_ptr<const ConvexFunction>> inequalities;
  Matrix equality_matrix;  // M x d
  Vector equality_targets;  // length M

  Index dimension() const { return set.dimension(); }
  Index num_inequalities() const {
    return static_cast<Index>(inequalities.size());
  }
  Index num_equalities() const { return equality_matrix.rows(); }
  bool is_linear() const;
};

// Stochastic online problem: arbitrary objectives f^t, i.i.d. constraints g^t
// and i.i.d. equality vectors h^t with targets b.
//
// Instances are immutable once built; sampling draws only from the caller's
// RNG, in a fixed order per slot, so replaying sample(0..T-1) with a fresh RNG
// seeded identically reproduces a run's sample path exactly.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string id() const = 0;
  const DecisionSet& set() const { return set_; }
  Index dimension() const { return set_.dimension(); }
  Index num_inequalities() const { return num_inequalities_; }
  Index num_equalities() const { return targets_.size(); }
  const Vector& targets() const { return targets_; }

  virtual std::unique_ptr<SlotRealization> sample(std::size_t t,
                                                  Rng& rng) const = 0;

  virtual bool has_exact_means() const { return false; }
  // Window average (1/k) sum_{s=t}^{t+k-1} E[f^s].
  virtual std::shared_ptr<const ConvexFunction> mean_objective(
      std::size_t t, std::size_t k) const;
  virtual std::shared_ptr<const ConvexFunction> mean_inequality(Index i) const;
  virtual Matrix mean_equality_vectors() const;

  virtual ProblemConstants constants(const BregmanGeometry& geometry) const = 0;

  // The windowed static program built from the exact means.
  StaticProgram static_program(std::size_t t, std::size_t k) const;

 protected:
  Problem(DecisionSet set, Index num_inequalities, Vector targets)
      : set_(std::move(set)),
        num_inequalities_(num_inequalities),
        targets_(std::move(targets)) {}

 private:
  DecisionSet set_;
  Index num_inequalities_;
  Vector targets_;
};

// sup_{x in set, y in interior} D(x, y) for the euclidean geometry on a box;
// infinite otherwise (KL is unbounded near the boundary).
double divergence_radius(const BregmanGeometry& geometry, const DecisionSet& set);

}  // namespace pdomd
