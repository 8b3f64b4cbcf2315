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
#include <vector>

#include "pdomd/problem.hpp"

namespace pdomd {

class InfeasibleError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

// Raised when the dual iterates blow up: multipliers are likely unbounded.
class DivergenceError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

struct DualPoint {
  Vector lambda;  // L, nonnegative
  Vector eta;     // M

  Index size() const { return lambda.size() + eta.size(); }
  double norm() const;
  Vector stacked() const;
  static DualPoint unstack(const Vector& x, Index num_inequalities);
};

struct OracleOptions {
  double kkt_tolerance = 1e-6;
  double dual_gap_tolerance = 1e-6;
  double inner_gap_tolerance = 1e-8;
  double divergence_norm = 1e6;
  int max_outer_iterations = 400;
  int max_inner_iterations = 200000;
};

struct HindsightResult {
  Vector mu;
  double value = 0.0;
  DualPoint multipliers;
  double inequality_residual = 0.0;  // |[g(mu)]_+|_2
  double equality_residual = 0.0;    // |A mu - b|_2
  double kkt_residual = 0.0;
  int outer_iterations = 0;
  // True when the program was built from sampled realizations rather than
  // exact means.
  bool estimated = false;
};

HindsightResult hindsight_optimum(const StaticProgram& program,
                                  const OracleOptions& options = {});
HindsightResult hindsight_optimum(const Problem& problem, std::size_t t,
                                  std::size_t k,
                                  const OracleOptions& options = {});

// Averages `draws` realizations of slots t..t+k-1 (cycled) into a static
// program. The fallback for problems without exact means.
StaticProgram sample_average_program(const Problem& problem, std::size_t t,
                                     std::size_t k, std::size_t draws,
                                     std::uint64_t seed);

struct DualEvaluation {
  double value = 0.0;
  Vector argmin;
  // Frank-Wolfe certificate on the inner minimization; zero when exact.
  double inner_gap = 0.0;
};

// q(lambda, eta) = min_mu f(mu) + <lambda, g(mu)> + <eta, A mu - b>.
DualEvaluation evaluate_dual(const StaticProgram& program, const DualPoint& point,
                             const OracleOptions& options = {});
double dual_function(const StaticProgram& program, const DualPoint& point,
                     const OracleOptions& options = {});
double dual_function(const Problem& problem, std::size_t t, std::size_t k,
                     const DualPoint& point, const OracleOptions& options = {});

struct MultiplierEstimate {
  DualPoint point;
  double bound = 0.0;  // |(lambda*, eta*)|_2
  double dual_value = 0.0;
  double primal_value = 0.0;
  double gap = 0.0;
};

MultiplierEstimate estimate_multipliers(const StaticProgram& program,
                                        const OracleOptions& options = {});
MultiplierEstimate estimate_multipliers(const Problem& problem, std::size_t t,
                                        std::size_t k,
                                        const OracleOptions& options = {});

struct WeakEbcEstimate {
  double c0 = 0.0;
  double l0 = 0.0;
  std::vector<double> radii;
  // min over samples at each radius of (q* - q(x)) / dist(x, optimum).
  std::vector<double> min_ratio;
  std::size_t excluded = 0;
};

// The optimal dual set is approximated by the single estimated optimum.
WeakEbcEstimate weak_ebc_probe(const StaticProgram& program,
                               const MultiplierEstimate& optimum,
                               std::size_t samples,
                               const std::vector<double>& radius_grid,
                               std::uint64_t seed = 0,
                               const OracleOptions& options = {});
WeakEbcEstimate weak_ebc_probe(const Problem& problem, std::size_t t,
                               std::size_t k, std::size_t samples,
                               const std::vector<double>& radius_grid,
                               std::uint64_t seed = 0,
                               const OracleOptions& options = {});

}  // namespace pdomd
