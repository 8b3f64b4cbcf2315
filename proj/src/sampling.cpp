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

#include "pdomd/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pdomd {

double pareto_scale(double mean, double shape) {
  require(shape > 1.0, "pareto: shape must exceed 1 for a finite mean");
  require(mean > 0.0, "pareto: mean must be positive");
  return mean * (shape - 1.0) / shape;
}

double pareto_sample(double mean, double shape, Rng& rng) {
  const double scale = pareto_scale(mean, shape);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // 1 - U lies in (0, 1], so the power is finite.
  return scale * std::pow(1.0 - unit(rng), -1.0 / shape);
}

std::int64_t poisson_sample(double mean, Rng& rng) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::int64_t> poisson(mean);
  return poisson(rng);
}

double ServiceCurve::operator()(double mu) const {
  return coefficient * std::log1p(rate * mu);
}

double ServiceCurve::derivative(double mu) const {
  return coefficient * rate / (1.0 + rate * mu);
}

double ServiceCurve::inverse(double target) const {
  if (target <= 0.0) return 0.0;
  const double mu = std::expm1(target / coefficient) / rate;
  return std::clamp(mu, 0.0, max_power);
}

}  // namespace pdomd
