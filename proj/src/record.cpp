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

#include "pdomd/record.hpp"

namespace pdomd {
namespace {

bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same(const Vector& a, const Vector& b) {
  return a.size() == b.size() && a == b;
}

}  // namespace

void RunRecord::resize(std::size_t horizon) {
  const Index T = static_cast<Index>(horizon);
  decisions.resize(T, header.dimension);
  objective.resize(T);
  inequality.resize(T, header.num_inequalities);
  equality.resize(T, header.num_equalities);
  q_norm.resize(T);
  h_norm.resize(T);
  drift.resize(T);
}

bool operator==(const RunHeader& a, const RunHeader& b) {
  return a.problem_id == b.problem_id && a.policy == b.policy &&
         a.geometry == b.geometry && a.variant == b.variant &&
         a.params.V == b.params.V && a.params.alpha == b.params.alpha &&
         a.params.theta == b.params.theta &&
         a.params.horizon == b.params.horizon &&
         a.params.drift_window == b.params.drift_window && a.seed == b.seed &&
         a.dimension == b.dimension &&
         a.num_inequalities == b.num_inequalities &&
         a.num_equalities == b.num_equalities &&
         a.config_hash == b.config_hash &&
         a.streaming_regret == b.streaming_regret;
}

// Wall time is excluded: it is the one field that legitimately differs
// between otherwise identical runs.
bool operator==(const RunRecord& a, const RunRecord& b) {
  return a.header == b.header && same(a.decisions, b.decisions) &&
         same(a.objective, b.objective) && same(a.inequality, b.inequality) &&
         same(a.equality, b.equality) && same(a.q_norm, b.q_norm) &&
         same(a.h_norm, b.h_norm) && same(a.drift, b.drift);
}

}  // namespace pdomd
