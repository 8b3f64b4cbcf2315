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

#include "pdomd/types.hpp"

namespace pdomd {

// Pareto draw with the given mean; scale x_m = mean (shape - 1) / shape.
// Requires shape > 1 so the mean exists.
double pareto_sample(double mean, double shape, Rng& rng);

double pareto_scale(double mean, double shape);

// Poisson draw. A nonpositive mean yields 0.
std::int64_t poisson_sample(double mean, Rng& rng);

// Mean number of jobs a server at power level mu serves in one slot:
// coefficient * log(1 + rate * mu).
struct ServiceCurve {
  double coefficient = 8.0;
  double rate = 4.0;
  double max_power = 30.0;

  double operator()(double mu) const;
  double derivative(double mu) const;
  // (exp(target / coefficient) - 1) / rate clipped to [0, max_power].
  double inverse(double target) const;
};

}  // namespace pdomd
