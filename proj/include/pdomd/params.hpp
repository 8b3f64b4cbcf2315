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
#include <string>

#include "pdomd/geometry.hpp"

namespace pdomd {

// general: Algorithm with an arbitrary geometry (euclidean in this library).
// simplex: KL geometry on the probability simplex with mixing toward uniform.
enum class Variant { kGeneral, kSimplex };

std::string to_string(Variant variant);
Variant parse_variant(const std::string& name);

// The geometry each variant runs with.
BregmanGeometry geometry_for(Variant variant);

struct AlgorithmParams {
  double V = 1.0;       // objective weight
  double alpha = 1.0;   // proximal weight
  double theta = 0.0;   // mixing weight (simplex variant)
  std::size_t horizon = 1;
  std::size_t drift_window = 1;  // t0; diagnostics only

  void validate() const;
};

// V = sqrt(T), alpha = T, t0 = round(sqrt(T)); theta = 1/T for the simplex
// variant and 0 otherwise. Requires T >= 2 so that theta < 1.
AlgorithmParams parameter_schedule(std::size_t horizon, Variant variant);

}  // namespace pdomd
