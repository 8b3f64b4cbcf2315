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

#include "pdomd/params.hpp"

#include <cmath>

#include "pdomd/types.hpp"

namespace pdomd {

std::string to_string(Variant variant) {
  return variant == Variant::kSimplex ? "simplex" : "general";
}

Variant parse_variant(const std::string& name) {
  if (name == "general") return Variant::kGeneral;
  if (name == "simplex") return Variant::kSimplex;
  throw ConfigError("unknown variant '" + name + "' (expected general|simplex)");
}

BregmanGeometry geometry_for(Variant variant) {
  return variant == Variant::kSimplex ? BregmanGeometry::negative_entropy()
                                      : BregmanGeometry::euclidean();
}

void AlgorithmParams::validate() const {
  require(V > 0.0 && std::isfinite(V), "params: V must be positive");
  require(alpha > 0.0 && std::isfinite(alpha), "params: alpha must be positive");
  require(theta >= 0.0 && theta < 1.0, "params: theta must lie in [0, 1)");
  require(horizon >= 1, "params: horizon must be positive");
  require(drift_window >= 1 && drift_window <= horizon,
          "params: drift window must lie in [1, T]");
}

AlgorithmParams parameter_schedule(std::size_t horizon, Variant variant) {
  require(horizon >= 2, "parameter_schedule: T must be at least 2");
  const double T = static_cast<double>(horizon);
  AlgorithmParams params;
  params.V = std::sqrt(T);
  params.alpha = T;
  params.theta = variant == Variant::kSimplex ? 1.0 / T : 0.0;
  params.horizon = horizon;
  params.drift_window = static_cast<std::size_t>(std::llround(std::sqrt(T)));
  return params;
}

}  // namespace pdomd
