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

#include <cstdint>
#include <memory>
#include <string>

#include "pdomd/problem.hpp"

namespace pdomd {

// Linear test bed with known means.
//
//   f^t(mu)   = <c + a sin(2 pi t / P) u + xi^t, mu>
//   g_i^t(mu) = <A_i + gamma_i^t, mu> - e_i
//   h_j^t     = Hbar_j + zeta_j^t
//
// with xi, gamma, zeta i.i.d. uniform on [-noise, noise] per coordinate.
struct SyntheticSpec {
  std::string id = "synthetic";
  DecisionSet set = DecisionSet::simplex(1);
  Vector objective_mean;
  Vector drift_direction;  // empty means no drift
  double drift_amplitude = 0.0;
  std::size_t drift_period = 1;
  double objective_noise = 0.0;
  Matrix inequality_matrix;   // L x d
  Vector inequality_offsets;  // e, length L
  double inequality_noise = 0.0;
  Matrix equality_matrix;    // M x d
  Vector equality_targets;   // b, length M
  double equality_noise = 0.0;
};

// Knobs for the randomized builder; the defaults are what the CLI and the
// acceptance suite use.
struct SyntheticOptions {
  DecisionSet::Kind set_kind = DecisionSet::Kind::kSimplex;
  double drift_amplitude = 0.3;
  std::size_t drift_period = 50;
  double objective_noise = 0.5;
  double inequality_noise = 0.5;
  double equality_noise = 0.5;
  // e_i = <A_i, mu0> + slack: mu0 is strictly feasible for the inequalities.
  double inequality_slack = 0.05;
};

class SyntheticProblem final : public Problem {
 public:
  explicit SyntheticProblem(SyntheticSpec spec);

  std::string id() const override { return spec_.id; }
  std::unique_ptr<SlotRealization> sample(std::size_t t,
                                          Rng& rng) const override;
  bool has_exact_means() const override { return true; }
  std::shared_ptr<const ConvexFunction> mean_objective(
      std::size_t t, std::size_t k) const override;
  std::shared_ptr<const ConvexFunction> mean_inequality(Index i) const override;
  Matrix mean_equality_vectors() const override {
    return spec_.equality_matrix;
  }
  ProblemConstants constants(const BregmanGeometry& geometry) const override;

  // c + a sin(2 pi t / P) u.
  Vector objective_coefficients(std::size_t t) const;
  const SyntheticSpec& spec() const { return spec_; }

 private:
  SyntheticSpec spec_;
};

std::shared_ptr<const SyntheticProblem> build_synthetic_problem(
    SyntheticSpec spec);

// Random SELM-satisfying instance: the equality means (together with the all
// ones vector on the simplex) are linearly independent and b = Hbar mu0 for an
// interior point mu0 that also satisfies the inequalities strictly.
std::shared_ptr<const SyntheticProblem> build_synthetic_problem(
    Index dimension, Index num_inequalities, Index num_equalities,
    std::uint64_t seed, const SyntheticOptions& options = {});

}  // namespace pdomd
