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

#include "pdomd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace pdomd {
namespace {

// Euclidean projection of x onto {v >= 0, sum v = mass}.
Vector project_scaled_simplex(const Vector& x, double mass) {
  const Index d = x.size();
  std::vector<double> sorted(x.data(), x.data() + d);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (Index k = 0; k < d; ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - mass) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) threshold = candidate;
  }
  return (x.array() - threshold).max(0.0).matrix();
}

// Smallest coordinate the entropy root search looks at; keeps log(mu / y)
// finite while staying far below any solution we care about.
constexpr double kEntropyFloor = 1e-300;

void check_entropy_arguments(const Vector& x, const Vector& y) {
  for (Index i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) {
      throw ConfigError(
          "bregman_divergence: negative entropy needs a strictly positive "
          "second argument");
    }
    if (x[i] < 0.0) {
      throw ConfigError(
          "bregman_divergence: negative entropy needs a nonnegative first "
          "argument");
    }
  }
}

}  // namespace

// --------------------------------------------------------------------------
// DecisionSet

DecisionSet::DecisionSet(Kind kind, Index dimension, Vector lower, Vector upper)
    : kind_(kind),
      dimension_(dimension),
      lower_(std::move(lower)),
      upper_(std::move(upper)) {}

DecisionSet DecisionSet::box(Vector lower, Vector upper) {
  require(lower.size() > 0, "box: dimension must be positive");
  require_same_size(lower, upper, "box");
  for (Index i = 0; i < lower.size(); ++i) {
    require(std::isfinite(lower[i]) && std::isfinite(upper[i]),
            "box: bounds must be finite");
    require(lower[i] <= upper[i], "box: lower bound exceeds upper bound");
  }
  const Index d = lower.size();
  return DecisionSet(Kind::kBox, d, std::move(lower), std::move(upper));
}

DecisionSet DecisionSet::simplex(Index dimension) {
  require(dimension > 0, "simplex: dimension must be positive");
  return DecisionSet(Kind::kSimplex, dimension, Vector::Zero(dimension),
                     Vector::Ones(dimension));
}

bool DecisionSet::contains(const Vector& mu, double tolerance) const {
  if (mu.size() != dimension_) return false;
  if (!mu.allFinite()) return false;
  if (kind_ == Kind::kSimplex) {
    return (mu.array() >= -tolerance).all() &&
           std::abs(mu.sum() - 1.0) <= tolerance;
  }
  return (mu.array() >= lower_.array() - tolerance).all() &&
         (mu.array() <= upper_.array() + tolerance).all();
}

Vector DecisionSet::project(const Vector& x) const {
  require_same_size(x, lower_, "DecisionSet::project");
  if (kind_ == Kind::kSimplex) return project_scaled_simplex(x, 1.0);
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

Vector DecisionSet::initial_point() const {
  if (kind_ == Kind::kSimplex) {
    return Vector::Constant(dimension_, 1.0 / static_cast<double>(dimension_));
  }
  return 0.5 * (lower_ + upper_);
}

Vector DecisionSet::sample_uniform(Rng& rng) const {
  Vector out(dimension_);
  if (kind_ == Kind::kSimplex) {
    std::exponential_distribution<double> exponential(1.0);
    for (Index i = 0; i < dimension_; ++i) out[i] = exponential(rng);
    return out / out.sum();
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Index i = 0; i < dimension_; ++i) {
    out[i] = lower_[i] + (upper_[i] - lower_[i]) * unit(rng);
  }
  return out;
}

std::string DecisionSet::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::kSimplex) {
    os << "simplex(" << dimension_ << ")";
  } else {
    os << "box(" << dimension_ << ")";
  }
  return os.str();
}

// --------------------------------------------------------------------------
// BregmanGeometry

double BregmanGeometry::primal_norm(const Vector& v) const {
  return kind_ == Kind::kEuclidean ? v.norm() : v.lpNorm<1>();
}

double BregmanGeometry::dual_norm(const Vector& v) const {
  return kind_ == Kind::kEuclidean ? v.norm() : v.lpNorm<Eigen::Infinity>();
}

std::string BregmanGeometry::name() const {
  return kind_ == Kind::kEuclidean ? "euclidean" : "negative_entropy";
}

double bregman_divergence(const BregmanGeometry& geometry, const Vector& x,
                          const Vector& y) {
  require_same_size(x, y, "bregman_divergence");
  if (geometry.kind() == BregmanGeometry::Kind::kEuclidean) {
    return 0.5 * (x - y).squaredNorm();
  }
  check_entropy_arguments(x, y);
  // Each summand x log(x/y) - x + y is nonnegative; 0 log 0 = 0.
  double total = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double term =
        x[i] == 0.0 ? y[i] : x[i] * std::log(x[i] / y[i]) - x[i] + y[i];
    total += std::max(term, 0.0);
  }
  return total;
}

// --------------------------------------------------------------------------
// Prox steps

Vector exponentiated_gradient_step(const Vector& mixed, const Vector& p) {
  require_same_size(mixed, p, "exponentiated_gradient_step");
  if (!p.allFinite()) {
    throw ConfigError("exponentiated_gradient_step: non-finite coefficient");
  }
  if (!(mixed.array() > 0.0).all()) {
    throw ConfigError(
        "exponentiated_gradient_step: prox center must be strictly positive");
  }
  const double shift = p.minCoeff();
  Vector weights(mixed.size());
  for (Index i = 0; i < mixed.size(); ++i) {
    weights[i] = std::max(mixed[i] * std::exp(-(p[i] - shift)),
                          std::numeric_limits<double>::min());
  }
  return weights / weights.sum();
}

Vector euclidean_box_step(const Vector& y, const Vector& p, double alpha,
                          const DecisionSet& set) {
  require_same_size(y, p, "euclidean_box_step");
  require(set.is_box(), "euclidean_box_step: set must be a box");
  require(y.size() == set.dimension(), "euclidean_box_step: dimension mismatch");
  require(alpha > 0.0, "euclidean_box_step: alpha must be positive");
  return (y - p / alpha).cwiseMax(set.lower()).cwiseMin(set.upper());
}

Vector mix_toward_uniform(const Vector& mu, double theta) {
  require(theta >= 0.0 && theta < 1.0,
          "mix_toward_uniform: theta must lie in [0, 1)");
  const double d = static_cast<double>(mu.size());
  return ((1.0 - theta) * mu.array() + theta / d).matrix();
}

Vector numeric_prox_step(const BregmanGeometry& geometry,
                         const DecisionSet& set, const Vector& y,
                         const Vector& p, double alpha,
                         const NumericProxOptions& options) {
  require_same_size(y, p, "numeric_prox_step");
  require(y.size() == set.dimension(), "numeric_prox_step: dimension mismatch");
  require(alpha > 0.0, "numeric_prox_step: alpha must be positive");

  const bool entropy =
      geometry.kind() == BregmanGeometry::Kind::kNegativeEntropy;
  if (entropy) {
    require((set.lower().array() >= 0.0).all(),
            "numeric_prox_step: negative entropy needs a nonnegative set");
    require((y.array() > 0.0).all(),
            "numeric_prox_step: negative entropy needs a positive center");
  }
  const Index d = set.dimension();
  int budget = options.max_iterations;

  // Root of p_i + nu + alpha * dD_i(m) = 0 on [lower_i, upper_i]. The left
  // side is increasing in m; entropy coordinates are searched in log space so
  // that tiny solutions keep full relative precision.
  auto coordinate = [&](Index i, double nu) {
    const double lo = set.lower()[i];
    const double hi = set.upper()[i];
    auto slope = [&](double m) {
      return p[i] + nu + alpha * (entropy ? std::log(m / y[i]) : m - y[i]);
    };
    if (slope(hi) <= 0.0) return hi;
    const double bottom = entropy ? std::max(lo, kEntropyFloor) : lo;
    if (slope(bottom) >= 0.0) return lo;
    double a = entropy ? std::log(bottom) : bottom;
    double b = entropy ? std::log(hi) : hi;
    for (;;) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (--budget < 0) {
        throw RuntimeError("numeric_prox_step: no convergence within iteration cap");
      }
      (slope(entropy ? std::exp(mid) : mid) < 0.0 ? a : b) = mid;
    }
    return entropy ? std::exp(0.5 * (a + b)) : 0.5 * (a + b);
  };
  auto solve = [&](double nu) {
    Vector mu(d);
    for (Index i = 0; i < d; ++i) mu[i] = coordinate(i, nu);
    return mu;
  };
  if (set.is_box()) return solve(0.0);

  // Simplex: bisection on the multiplier of sum(mu) = 1; the sum decreases
  // in nu.
  double lo = -1.0, hi = 1.0;
  while (solve(lo).sum() < 1.0) lo *= 2.0;
  while (solve(hi).sum() > 1.0) hi *= 2.0;
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (solve(mid).sum() > 1.0 ? lo : hi) = mid;
  }
  const Vector mu = solve(0.5 * (lo + hi));
  return mu / mu.sum();
}

Vector mirror_step(const BregmanGeometry& geometry, const DecisionSet& set,
                   const Vector& y, const Vector& p, double alpha) {
  require_same_size(y, p, "mirror_step");
  require(y.size() == set.dimension(), "mirror_step: dimension mismatch");
  require(alpha > 0.0, "mirror_step: alpha must be positive");
  if (p.isZero(0.0)) return y;
  const bool entropy =
      geometry.kind() == BregmanGeometry::Kind::kNegativeEntropy;
  if (entropy && set.is_simplex()) {
    return exponentiated_gradient_step(y, p / alpha);
  }
  if (!entropy && set.is_box()) return euclidean_box_step(y, p, alpha, set);
  return numeric_prox_step(geometry, set, y, p, alpha);
}

PushbackResult pushback_check(const BregmanGeometry& geometry,
                              const DecisionSet& set,
                              const Vector& linear_term, const Vector& y,
                              double alpha, const Vector& z,
                              double tolerance) {
  const Vector x_star = mirror_step(geometry, set, y, linear_term, alpha);
  const double lhs =
      linear_term.dot(x_star) + alpha * bregman_divergence(geometry, x_star, y);
  const double rhs = linear_term.dot(z) +
                     alpha * bregman_divergence(geometry, z, y) -
                     alpha * bregman_divergence(geometry, z, x_star);
  const double residual = rhs - lhs;
  return {residual >= -tolerance, residual};
}

}  // namespace pdomd
