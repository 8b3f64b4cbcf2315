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

#include <string>

#include "pdomd/types.hpp"

namespace pdomd {

// Compact convex decision set: an axis-aligned box or the probability simplex.
class DecisionSet {
 public:
  enum class Kind { kBox, kSimplex };

  static DecisionSet box(Vector lower, Vector upper);
  static DecisionSet simplex(Index dimension);

  Kind kind() const { return kind_; }
  Index dimension() const { return dimension_; }
  bool is_box() const { return kind_ == Kind::kBox; }
  bool is_simplex() const { return kind_ == Kind::kSimplex; }

  // Box bounds. For the simplex these are 0 and 1.
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains(const Vector& mu, double tolerance = 1e-12) const;

  // Euclidean projection onto the set.
  Vector project(const Vector& x) const;

  // Box midpoint, or the uniform distribution on the simplex.
  Vector initial_point() const;

  // Uniform draw from the set (Dirichlet(1) on the simplex).
  Vector sample_uniform(Rng& rng) const;

  std::string describe() const;

 private:
  DecisionSet(Kind kind, Index dimension, Vector lower, Vector upper);

  Kind kind_;
  Index dimension_;
  Vector lower_;
  Vector upper_;
};

// Distance-generating function together with its divergence, norm pair and
// strong-convexity modulus.
//
//   euclidean:         omega = 1/2 |x|_2^2, D = 1/2 |x - y|_2^2, l2 / l2.
//   negative_entropy:  omega = sum x log x,  D = KL(x || y),      l1 / linf.
//
// Both have modulus 1. On the simplex the entropy divergence is exactly KL;
// on a nonnegative box the generalized form sum x log(x/y) - x + y is used.
class BregmanGeometry {
 public:
  enum class Kind { kEuclidean, kNegativeEntropy };

  static BregmanGeometry euclidean() { return BregmanGeometry(Kind::kEuclidean); }
  static BregmanGeometry negative_entropy() {
    return BregmanGeometry(Kind::kNegativeEntropy);
  }

  Kind kind() const { return kind_; }
  double modulus() const { return 1.0; }
  double primal_norm(const Vector& v) const;
  double dual_norm(const Vector& v) const;
  std::string name() const;

 private:
  explicit BregmanGeometry(Kind kind) : kind_(kind) {}
  Kind kind_;
};

double bregman_divergence(const BregmanGeometry& geometry, const Vector& x,
                          const Vector& y);

// Solves min_{mu in set} <p, mu> + alpha * D(mu, y).
//
// Closed forms are used for (simplex, negative_entropy) and
// (box, euclidean); every other pairing goes through numeric_prox_step.
Vector mirror_step(const BregmanGeometry& geometry, const DecisionSet& set,
                   const Vector& y, const Vector& p, double alpha);

// Multiplicative-weights update mu_i = m_i exp(-p_i) / sum_k m_k exp(-p_k).
// The caller folds the 1/alpha factor into p. Uses max-subtraction, so adding a
// constant to every p_i leaves the result bit-identical.
Vector exponentiated_gradient_step(const Vector& mixed, const Vector& p);

// clip(y - p / alpha, lower, upper): the exact prox step for D = 1/2 |.|_2^2.
Vector euclidean_box_step(const Vector& y, const Vector& p, double alpha,
                          const DecisionSet& set);

// (1 - theta) mu + theta / d.
Vector mix_toward_uniform(const Vector& mu, double theta);

struct NumericProxOptions {
  // Cap on the total number of inner bisection steps.
  int max_iterations = 10000000;
};

// Solves the KKT conditions by bisection: one monotone root search per
// coordinate, nested inside a search over the multiplier of the sum
// constraint on the simplex. Works for any geometry/set pairing in this
// library; throws RuntimeError if the iteration cap is reached.
Vector numeric_prox_step(const BregmanGeometry& geometry,
                         const DecisionSet& set, const Vector& y,
                         const Vector& p, double alpha,
                         const NumericProxOptions& options = {});

struct PushbackResult {
  bool holds;
  // [f(z) + a D(z, y) - a D(z, x*)] - [f(x*) + a D(x*, y)]; nonnegative when
  // the three-point inequality holds.
  double residual;
};

// Diagnostic for the three-point (pushback) inequality with the linear test
// function f(x) = <linear_term, x>, where x* = mirror_step(..., linear_term).
PushbackResult pushback_check(const BregmanGeometry& geometry,
                              const DecisionSet& set,
                              const Vector& linear_term, const Vector& y,
                              double alpha, const Vector& z,
                              double tolerance = 1e-9);

}  // namespace pdomd
