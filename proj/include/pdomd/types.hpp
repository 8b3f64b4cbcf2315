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
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace pdomd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// All stochastic draws go through a caller-owned engine so that runs are
// replayable from their seed.
using Rng = std::mt19937_64;

// Raised when an input violates a documented precondition that the caller
// can fix (bad dimensions, out-of-range parameters, malformed files).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numeric procedure fails at run time (no convergence,
// infeasible program, unbounded multipliers, replay mismatch).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

inline void require_same_size(const Vector& a, const Vector& b,
                              const char* what) {
  if (a.size() != b.size()) {
    throw ConfigError(std::string(what) + ": dimension mismatch (" +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
}

}  // namespace pdomd
