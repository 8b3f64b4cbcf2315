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
#include <optional>
#include <string>

#include "pdomd/params.hpp"
#include "pdomd/types.hpp"

namespace pdomd {

struct RunHeader {
  std::string problem_id;
  std::string policy = "primal-dual";  // or "reac", "fixed"
  std::string geometry;
  Variant variant = Variant::kGeneral;
  AlgorithmParams params;
  std::uint64_t seed = 0;
  Index dimension = 0;
  Index num_inequalities = 0;
  Index num_equalities = 0;
  std::string config_hash;
  double wall_time_seconds = 0.0;
  // Realized regret against a comparator, accumulated while running.
  std::optional<double> streaming_regret;
};

// Per-slot trajectory of one run. Row t holds mu^t, the realized slot-t values
// at mu^t, and the dual state after the update performed in slot t (so
// q_norm[t] = |Q(t+1)|_2 and drift[t] is the drift of that update).
struct RunRecord {
  RunHeader header;
  Matrix decisions;    // T x d
  Vector objective;    // f^t(mu^t)
  Matrix inequality;   // T x L, g_i^t(mu^t)
  Matrix equality;     // T x M, <h_j^t, mu^t>
  Vector q_norm;
  Vector h_norm;
  Vector drift;

  std::size_t length() const {
    return static_cast<std::size_t>(objective.size());
  }
  void resize(std::size_t horizon);
};

bool operator==(const RunHeader& a, const RunHeader& b);
bool operator==(const RunRecord& a, const RunRecord& b);

}  // namespace pdomd
