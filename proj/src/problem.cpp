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

#include "pdomd/problem.hpp"

#include <cmath>
#include <limits>

namespace pdomd {

Vector SlotRealization::inequalities(const Vector& mu) const {
  Vector out(num_inequalities());
  for (Index i = 0; i < out.size(); ++i) out[i] = inequality(i, mu);
  return out;
}

Observation SlotRealization::observe(const Vector& mu) const {
  Observation obs;
  obs.objective_value = objective(mu);
  obs.objective_gradient = objective_gradient(mu);
  const Index L = num_inequalities();
  obs.constraint_values.resize(L);
  obs.constraint_gradients.resize(L, mu.size());
  for (Index i = 0; i < L; ++i) {
    obs.constraint_values[i] = inequality(i, mu);
    obs.constraint_gradients.row(i) = inequality_gradient(i, mu).transpose();
  }
  obs.equality_vectors = equality_vectors();
  return obs;
}

bool StaticProgram::is_linear() const {
  if (!objective->affine()) return false;
  for (const auto& g : inequalities) {
    if (!g->affine()) return false;
  }
  return true;
}

std::shared_ptr<const ConvexFunction> Problem::mean_objective(std::size_t,
                                                              std::size_t) const {
  throw RuntimeError("problem '" + id() + "' has no exact means");
}

std::shared_ptr<const ConvexFunction> Problem::mean_inequality(Index) const {
  throw RuntimeError("problem '" + id() + "' has no exact means");
}

Matrix Problem::mean_equality_vectors() const {
  throw RuntimeError("problem '" + id() + "' has no exact means");
}

StaticProgram Problem::static_program(std::size_t t, std::size_t k) const {
  if (!has_exact_means()) {
    throw RuntimeError("problem '" + id() + "' has no exact means");
  }
  require(k > 0, "static_program: window length must be positive");
  StaticProgram program{set(), mean_objective(t, k), {}, mean_equality_vectors(),
                        targets()};
  for (Index i = 0; i < num_inequalities(); ++i) {
    program.inequalities.push_back(mean_inequality(i));
  }
  return program;
}

double divergence_radius(const BregmanGeometry& geometry,
                         const DecisionSet& set) {
  if (geometry.kind() == BregmanGeometry::Kind::kEuclidean) {
    if (set.is_simplex()) return 1.0;  // 1/2 |e_i - e_j|^2
    return 0.5 * (set.upper() - set.lower()).squaredNorm();
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace pdomd
